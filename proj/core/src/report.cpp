#include "viewdrift/harness/report.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "viewdrift/kv.hpp"

namespace viewdrift::harness {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kRecordsHeader =
    "scenario,category,group,fold,seed,detector_seed,pipeline,status,window_first,variation,"
    "u_x,u_y,s,e_plan_search,d1,d2,d3,mean_d,pdr,ape,mtd,mbd,asr,cv,bfs,e_plan,hard_brake,"
    "overtake_abandoned,loss_trace,texture_ppm,texture_sidecar,scenario_file";
constexpr int kRecordsColumns = 32;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long parse_long(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') throw InvalidInput("records: not an integer: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0') throw InvalidInput("records: not an unsigned integer: " + s);
  return v;
}

struct Agg {
  int n = 0, ncv = 0, brake = 0, abandon = 0;
  double d1 = 0, d2 = 0, d3 = 0, pdr = 0, ape = 0, mtd = 0, mbd = 0, asr = 0, bfs = 0,
         e_plan = 0, cv = 0;

  void add(const ExperimentRecord& r) {
    ++n;
    d1 += r.report.d1;
    d2 += r.report.d2;
    d3 += r.report.d3;
    pdr += r.report.pdr;
    ape += r.report.ape;
    mtd += r.report.mtd;
    mbd += r.report.mbd;
    asr += r.report.asr;
    bfs += r.report.bfs;
    e_plan += r.e_plan;
    if (std::isfinite(r.report.cv)) {
      cv += r.report.cv;
      ++ncv;
    }
    if (r.hard_brake) ++brake;
    if (r.overtake_abandoned) ++abandon;
  }

  ordered_json json() const {
    if (n == 0) return nullptr;
    ordered_json j;
    j["n"] = n;
    j["mean_d1"] = d1 / n;
    j["mean_d2"] = d2 / n;
    j["mean_d3"] = d3 / n;
    j["mean_d"] = (d1 + d2 + d3) / (3.0 * n);
    j["pdr"] = pdr / n;
    j["mean_ape"] = ape / n;
    j["mean_mtd"] = mtd / n;
    j["mean_mbd"] = mbd / n;
    j["asr"] = asr / n;
    j["mean_cv"] = ncv > 0 ? ordered_json(cv / ncv) : ordered_json(nullptr);
    j["mean_bfs"] = bfs / n;
    j["mean_e_plan"] = e_plan / n;
    j["hard_brake_rate"] = 100.0 * brake / n;
    j["overtake_abandoned_rate"] = 100.0 * abandon / n;
    return j;
  }
};

}  // namespace

void write_trace_csv(const std::string& path, const std::vector<attack::TracePoint>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "step,total,move,prog,fid,tv,nps\n";
  for (const auto& p : trace)
    out << p.step << ',' << kv::fmt(p.total) << ',' << kv::fmt(p.move) << ',' << kv::fmt(p.prog)
        << ',' << kv::fmt(p.fid) << ',' << kv::fmt(p.tv) << ',' << kv::fmt(p.nps) << '\n';
}

void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    const double mean_d = (r.report.d1 + r.report.d2 + r.report.d3) / 3.0;
    out << r.scenario_id << ',' << r.category << ',' << r.group << ',' << r.fold << ','
        << r.seed << ',' << r.detector_seed << ',' << r.pipeline << ',' << r.status << ','
        << r.window_first << ',' << kv::fmt(r.variation) << ',' << kv::fmt(r.target.u[0]) << ','
        << kv::fmt(r.target.u[1]) << ',' << kv::fmt(r.target.s) << ','
        << kv::fmt(r.target.e_plan) << ',' << kv::fmt(r.report.d1) << ','
        << kv::fmt(r.report.d2) << ',' << kv::fmt(r.report.d3) << ',' << kv::fmt(mean_d) << ','
        << kv::fmt(r.report.pdr) << ',' << kv::fmt(r.report.ape) << ',' << kv::fmt(r.report.mtd)
        << ',' << kv::fmt(r.report.mbd) << ',' << kv::fmt(r.report.asr) << ','
        << kv::fmt(r.report.cv) << ',' << kv::fmt(r.report.bfs) << ',' << kv::fmt(r.e_plan)
        << ',' << (r.hard_brake ? 1 : 0) << ',' << (r.overtake_abandoned ? 1 : 0) << ','
        << r.loss_trace << ',' << r.texture_ppm << ',' << r.texture_sidecar << ','
        << r.scenario_file << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("records: empty file " + path);
  if (line == std::string(kRecordsHeader) + "\r") line.pop_back();
  if (line != kRecordsHeader) throw InvalidInput("records: unexpected header in " + path);
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (static_cast<int>(f.size()) != kRecordsColumns)
      throw InvalidInput("records: bad column count in " + path);
    ExperimentRecord r;
    r.scenario_id = f[0];
    r.category = f[1];
    r.group = f[2];
    r.fold = static_cast<int>(parse_long(f[3]));
    r.seed = parse_u64(f[4]);
    r.detector_seed = parse_u64(f[5]);
    r.pipeline = f[6];
    r.status = f[7];
    r.window_first = static_cast<std::size_t>(parse_long(f[8]));
    r.variation = kv::parse_double(f[9]);
    r.target.u[0] = kv::parse_double(f[10]);
    r.target.u[1] = kv::parse_double(f[11]);
    r.target.s = kv::parse_double(f[12]);
    r.target.e_plan = kv::parse_double(f[13]);
    r.report.d1 = kv::parse_double(f[14]);
    r.report.d2 = kv::parse_double(f[15]);
    r.report.d3 = kv::parse_double(f[16]);
    // f[17] mean_d is derived
    r.report.pdr = kv::parse_double(f[18]);
    r.report.ape = kv::parse_double(f[19]);
    r.report.mtd = kv::parse_double(f[20]);
    r.report.mbd = kv::parse_double(f[21]);
    r.report.asr = kv::parse_double(f[22]);
    r.report.cv = kv::parse_double(f[23]);
    r.report.bfs = kv::parse_double(f[24]);
    r.e_plan = kv::parse_double(f[25]);
    r.hard_brake = parse_long(f[26]) != 0;
    r.overtake_abandoned = parse_long(f[27]) != 0;
    r.loss_trace = f[28];
    r.texture_ppm = f[29];
    r.texture_sidecar = f[30];
    r.scenario_file = f[31];
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_json(const std::string& path, const std::vector<ExperimentRecord>& records,
                        const SummaryExtras& extras) {
  int ok = 0, rejected = 0, skipped = 0, error = 0;
  Agg overall;
  std::map<std::string, Agg> by_category, by_group;
  for (const auto& r : records) {
    if (r.ok()) {
      ++ok;
      overall.add(r);
      by_category[r.category].add(r);
      if (!r.group.empty()) by_group[r.group].add(r);
    } else if (r.status.rfind("rejected", 0) == 0) {
      ++rejected;
    } else if (r.status.rfind("skipped", 0) == 0) {
      ++skipped;
    } else {
      ++error;
    }
  }

  ordered_json j;
  j["counts"] = {{"total", records.size()},
                 {"ok", ok},
                 {"rejected", rejected},
                 {"skipped", skipped},
                 {"error", error}};
  j["overall"] = overall.json();
  ordered_json cats = ordered_json::object();
  for (const auto& [k, agg] : by_category) cats[k] = agg.json();
  j["by_category"] = cats;
  ordered_json groups = ordered_json::object();
  for (const auto& [k, agg] : by_group) groups[k] = agg.json();
  j["by_group"] = groups;

  if (!extras.folds.empty()) {
    ordered_json folds = ordered_json::array();
    for (const auto& f : extras.folds) {
      ordered_json fj;
      fj["fold"] = f.fold;
      fj["skipped"] = f.skipped;
      fj["train_size"] = f.train_size;
      fj["test_size"] = f.test_size;
      fj["u"] = {f.group.u[0], f.group.u[1]};
      fj["s"] = f.group.s;
      folds.push_back(fj);
    }
    j["folds"] = folds;
  }
  if (!extras.ablation.empty()) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : extras.ablation) {
      ordered_json rj;
      rj["name"] = row.name;
      rj["d3"] = row.d3;
      rj["cv"] = row.cv;
      rj["pdr"] = row.pdr;
      rj["bfs"] = row.bfs;
      rj["asr"] = row.asr;
      rows.push_back(rj);
    }
    j["ablation"] = rows;
  }
  if (!extras.size_curve.empty()) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : extras.size_curve) {
      ordered_json pj;
      pj["train_size"] = p.train_size;
      pj["mean_d3"] = p.mean_d3;
      pj["pdr"] = p.pdr;
      pts.push_back(pj);
    }
    j["size_curve"] = pts;
  }
  if (!extras.notes.empty()) j["notes"] = extras.notes;
  j["group_goal_granularity"] = extras.group_goal_granularity;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace viewdrift::harness
