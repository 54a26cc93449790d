#pragma once

#include "tuner/dataset.hpp"
#include "tuner/kernel_selection.hpp"
#include "tuner/quad_env.hpp"
#include "tuner/safe_bo.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tuner::io {

/// Full-precision decimal rendering that round-trips doubles exactly.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// prior.csv: header p1..pD,P
void write_prior_csv(const std::string& path, const Dataset& data);
Dataset read_prior_csv(const std::string& path);

/// trace.csv: header iter,p1..pD,P,safe,lb_at_selection,best_so_far,stalled
void write_trace_csv(const std::string& path, const BoTrace& trace);
BoTrace read_trace_csv(const std::string& path);

/// trajectory.csv: t,x,z,theta,x_ref,z_ref,theta_ref,T1,T2 per step
void write_trajectory_csv(const std::string& path, const quad::EpisodeResult& result);

nlohmann::ordered_json kernel_spec_to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

/// selection.json payload
struct SelectionReport {
  KernelRanking ranking;
  Vector importances;
  KernelSpec reduced;
};

void write_selection_json(const std::string& path, const SelectionReport& report);
SelectionReport read_selection_json(const std::string& path);

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc);
nlohmann::json read_json_file(const std::string& path);

/// manifest.json: everything needed to reproduce the run in serial mode.
struct RunManifest {
  std::string run_id;
  std::string command;
  nlohmann::ordered_json config;
  std::uint64_t master_seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> stage_streams;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;
  std::vector<std::string> artifacts;
  std::string version;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

std::string utc_timestamp();

}  // namespace tuner::io
