#include "tuner/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace tuner::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": row " + std::to_string(row) + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

void write_prior_csv(const std::string& path, const Dataset& data) {
  std::ostringstream out;
  for (Eigen::Index d = 0; d < data.dims(); ++d) out << "p" << (d + 1) << ",";
  out << "P\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index d = 0; d < data.dims(); ++d) out << format_double(data.x(i, d)) << ",";
    out << format_double(data.y(i)) << "\n";
  }
  write_text_file(path, out.str());
}

Dataset read_prior_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "P")
    throw IoError(path + ": row 1: expected header p1..pD,P");
  const int dims = static_cast<int>(header.size()) - 1;

  std::vector<Vector> xs;
  std::vector<double> ys;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != dims + 1)
      throw IoError(path + ": row " + std::to_string(row) + ": expected " +
                    std::to_string(dims + 1) + " fields, got " + std::to_string(fields.size()));
    Vector x(dims);
    for (int d = 0; d < dims; ++d) x(d) = parse_double(fields[d], path, row);
    xs.push_back(std::move(x));
    ys.push_back(parse_double(fields[dims], path, row));
  }
  if (xs.empty()) throw IoError(path + ": no data rows");
  Matrix x(static_cast<Eigen::Index>(xs.size()), dims);
  Vector y(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
    y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  return Dataset(std::move(x), std::move(y));
}

void write_trace_csv(const std::string& path, const BoTrace& trace) {
  std::ostringstream out;
  const Eigen::Index dims = trace.records.empty() ? 0 : trace.records.front().params.size();
  out << "iter,";
  for (Eigen::Index d = 0; d < dims; ++d) out << "p" << (d + 1) << ",";
  out << "P,safe,lb_at_selection,best_so_far,stalled\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ",";
    for (Eigen::Index d = 0; d < dims; ++d) out << format_double(r.params(d)) << ",";
    out << format_double(r.performance) << "," << (r.safe ? 1 : 0) << ","
        << format_double(r.lower_bound) << "," << format_double(r.best_so_far) << ","
        << (r.stalled ? 1 : 0) << "\n";
  }
  write_text_file(path, out.str());
}

BoTrace read_trace_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 6 || header.front() != "iter" || header.back() != "stalled")
    throw IoError(path + ": row 1: unexpected trace header");
  const int dims = static_cast<int>(header.size()) - 6;

  BoTrace trace;
  int row = 1;
  double best = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != dims + 6)
      throw IoError(path + ": row " + std::to_string(row) + ": expected " +
                    std::to_string(dims + 6) + " fields");
    BoRecord r;
    r.iteration = static_cast<int>(parse_double(fields[0], path, row));
    r.params.resize(dims);
    for (int d = 0; d < dims; ++d) r.params(d) = parse_double(fields[1 + d], path, row);
    r.performance = parse_double(fields[dims + 1], path, row);
    r.safe = parse_double(fields[dims + 2], path, row) != 0.0;
    r.lower_bound = parse_double(fields[dims + 3], path, row);
    r.best_so_far = parse_double(fields[dims + 4], path, row);
    r.stalled = parse_double(fields[dims + 5], path, row) != 0.0;
    if (r.best_so_far > best) {
      best = r.best_so_far;
      trace.best_params = r.params;
    }
    trace.records.push_back(std::move(r));
  }
  trace.best_performance = best;
  return trace;
}

void write_trajectory_csv(const std::string& path, const quad::EpisodeResult& result) {
  std::ostringstream out;
  out << "t,x,z,theta,x_ref,z_ref,theta_ref,T1,T2\n";
  for (const auto& s : result.trace) {
    out << format_double(s.t) << "," << format_double(s.state.x) << ","
        << format_double(s.state.z) << "," << format_double(s.state.theta) << ","
        << format_double(s.x_ref) << "," << format_double(s.z_ref) << ","
        << format_double(s.theta_ref) << "," << format_double(s.thrust_left) << ","
        << format_double(s.thrust_right) << "\n";
  }
  write_text_file(path, out.str());
}

ordered_json kernel_spec_to_json(const KernelSpec& spec) {
  ordered_json j;
  j["dims"] = spec.dims;
  j["orders"] = spec.orders;
  j["order_weights"] = spec.order_weights;
  j["first_order_only_dims"] = spec.first_order_only_dims;
  j["lengthscale"] = std::vector<double>(spec.base.lengthscale.begin(), spec.base.lengthscale.end());
  j["signal_variance"] =
      std::vector<double>(spec.base.signal_variance.begin(), spec.base.signal_variance.end());
  return j;
}

KernelSpec kernel_spec_from_json(const json& j) {
  KernelSpec spec;
  spec.dims = j.at("dims").get<std::vector<int>>();
  spec.orders = j.at("orders").get<std::vector<int>>();
  spec.order_weights = j.at("order_weights").get<std::vector<double>>();
  spec.first_order_only_dims = j.at("first_order_only_dims").get<std::vector<int>>();
  const auto ell = j.at("lengthscale").get<std::vector<double>>();
  const auto var = j.at("signal_variance").get<std::vector<double>>();
  spec.base.lengthscale = Eigen::Map<const Vector>(ell.data(), static_cast<Eigen::Index>(ell.size()));
  spec.base.signal_variance =
      Eigen::Map<const Vector>(var.data(), static_cast<Eigen::Index>(var.size()));
  spec.validate();
  return spec;
}

void write_selection_json(const std::string& path, const SelectionReport& report) {
  ordered_json j;
  j["avg_cree"] = report.ranking.avg_cree;
  j["trials"] = report.ranking.trials;
  j["sorted_orders"] = report.ranking.sorted_orders;
  j["selected_orders"] = report.ranking.selected;
  j["importances"] =
      std::vector<double>(report.importances.begin(), report.importances.end());
  j["reduced_kernel"] = kernel_spec_to_json(report.reduced);
  write_json_file(path, j);
}

SelectionReport read_selection_json(const std::string& path) {
  const json j = read_json_file(path);
  SelectionReport report;
  try {
    report.ranking.avg_cree = j.at("avg_cree").get<std::vector<double>>();
    report.ranking.trials = j.at("trials").get<int>();
    report.ranking.sorted_orders = j.at("sorted_orders").get<std::vector<int>>();
    report.ranking.selected = j.at("selected_orders").get<std::vector<int>>();
    const auto imp = j.at("importances").get<std::vector<double>>();
    report.importances = Eigen::Map<const Vector>(imp.data(), static_cast<Eigen::Index>(imp.size()));
    report.reduced = kernel_spec_from_json(j.at("reduced_kernel"));
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed selection report: " + e.what());
  }
  return report;
}

void write_json_file(const std::string& path, const ordered_json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw IoError(path + ": invalid JSON: " + e.what());
  }
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  ordered_json j;
  j["run_id"] = manifest.run_id;
  j["command"] = manifest.command;
  j["version"] = manifest.version;
  j["master_seed"] = manifest.master_seed;
  ordered_json streams = ordered_json::object();
  for (const auto& [stage, id] : manifest.stage_streams) streams[stage] = id;
  j["stage_streams"] = streams;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["artifacts"] = manifest.artifacts;
  j["config"] = manifest.config;
  write_json_file(path, j);
}

RunManifest read_manifest(const std::string& path) {
  const json j = read_json_file(path);
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& item : j.at("stage_streams").items())
      m.stage_streams.emplace_back(item.key(), item.value().get<std::uint64_t>());
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.config = j.at("config");
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed manifest: " + e.what());
  }
  return m;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace tuner::io
