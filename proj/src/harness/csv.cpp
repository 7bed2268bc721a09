#include "lanesafe/harness/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "lanesafe/error.hpp"

namespace lanesafe::harness {

const std::vector<std::string> kRunColumns = {
    "step",       "episode",      "reward",    "cost",        "lambda",
    "jc_estimate", "pid_error",   "pid_integral", "pid_delta", "q1_loss",
    "q2_loss",    "cost_loss",    "actor_loss", "discrete_entropy", "updated"};

const std::vector<std::string> kEpisodeColumns = {
    "episode", "end_step", "return", "cost_total", "length", "termination", "lambda",
    "jc_estimate"};

const std::vector<std::string> kMetricsColumns = {
    "algorithm",        "density",          "seed",          "episodes",
    "total_steps",      "average_reward",   "collision_rate", "average_acceleration",
    "average_speed",    "average_jerk",     "average_jerk_penalty", "lane_changes",
    "mean_episode_cost"};

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string integer(T v) {
  return std::to_string(v);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.flush();
    if (!out_) throw IoError("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_run_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvWriter w(path, kRunColumns);
  for (const auto& r : log.steps) {
    w.row({integer(r.step), integer(r.episode), num(r.reward), num(r.cost), num(r.lambda),
           num(r.cost_estimate), num(r.pid_error), num(r.pid_integral), num(r.pid_delta),
           num(r.q1_loss), num(r.q2_loss), num(r.cost_loss), num(r.actor_loss),
           num(r.discrete_entropy), r.updated ? "1" : "0"});
  }
  w.close();
}

void write_episodes_csv(const std::filesystem::path& path, const RunLog& log) {
  CsvWriter w(path, kEpisodeColumns);
  for (const auto& e : log.episodes) {
    w.row({integer(e.episode), integer(e.end_step), num(e.episode_return), num(e.cost_total),
           integer(e.length), e.termination, num(e.lambda), num(e.cost_estimate)});
  }
  w.close();
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows) {
  CsvWriter w(path, kMetricsColumns);
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    w.row({r.algorithm, num(r.density), integer(r.seed), integer(m.episodes),
           integer(m.total_steps), num(m.average_reward), num(m.collision_rate),
           num(m.average_acceleration), num(m.average_speed), num(m.average_jerk),
           num(m.average_jerk_penalty), integer(m.lane_changes), num(m.mean_episode_cost)});
  }
  w.close();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw StructuralError("csv: no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const auto& field = rows.at(row).at(column(name));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || field.empty())
    throw StructuralError("csv: column '" + name + "' holds non-numeric '" + field + "'");
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw StructuralError(path.string() + ": missing header");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size())
      throw StructuralError(path.string() + ": row with " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

RunLog read_run_log(const std::filesystem::path& run_csv, const std::filesystem::path& episodes_csv,
                    bool constrained) {
  RunLog log;
  log.constrained = constrained;
  const auto steps = read_csv(run_csv);
  if (steps.header != kRunColumns) throw StructuralError(run_csv.string() + ": unexpected header");
  for (std::size_t i = 0; i < steps.rows.size(); ++i) {
    StepRecord r;
    r.step = static_cast<std::uint64_t>(steps.number(i, "step"));
    r.episode = static_cast<std::uint64_t>(steps.number(i, "episode"));
    r.reward = steps.number(i, "reward");
    r.cost = steps.number(i, "cost");
    r.lambda = steps.number(i, "lambda");
    r.cost_estimate = steps.number(i, "jc_estimate");
    r.pid_error = steps.number(i, "pid_error");
    r.pid_integral = steps.number(i, "pid_integral");
    r.pid_delta = steps.number(i, "pid_delta");
    r.q1_loss = steps.number(i, "q1_loss");
    r.q2_loss = steps.number(i, "q2_loss");
    r.cost_loss = steps.number(i, "cost_loss");
    r.actor_loss = steps.number(i, "actor_loss");
    r.discrete_entropy = steps.number(i, "discrete_entropy");
    r.updated = steps.number(i, "updated") != 0.0;
    log.steps.push_back(r);
  }
  const auto eps = read_csv(episodes_csv);
  if (eps.header != kEpisodeColumns)
    throw StructuralError(episodes_csv.string() + ": unexpected header");
  for (std::size_t i = 0; i < eps.rows.size(); ++i) {
    EpisodeRecord e;
    e.episode = static_cast<std::uint64_t>(eps.number(i, "episode"));
    e.end_step = static_cast<std::uint64_t>(eps.number(i, "end_step"));
    e.episode_return = eps.number(i, "return");
    e.cost_total = eps.number(i, "cost_total");
    e.length = static_cast<std::uint64_t>(eps.number(i, "length"));
    e.termination = eps.rows[i][eps.column("termination")];
    e.lambda = eps.number(i, "lambda");
    e.cost_estimate = eps.number(i, "jc_estimate");
    log.episodes.push_back(e);
  }
  return log;
}

}  // namespace lanesafe::harness
