#include "tsmin/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "tsmin/artifacts.hpp"
#include "tsmin/error.hpp"

namespace tsmin::eval {

using nlohmann::ordered_json;

FaultMap parse_fault_map(std::string_view text) {
  ordered_json doc = parse_json(text, "fault map");
  check_format(doc, "tsmin-faultmap", 1, "fault map");
  FaultMap map;
  try {
    std::set<std::string> ids;
    for (const auto& v : doc.at("versions")) {
      FaultVersion fv;
      fv.id = v.at("id").get<std::string>();
      fv.failing = v.at("failing").get<std::vector<std::string>>();
      if (!ids.insert(fv.id).second)
        throw Error(ErrorKind::Data, "fault map: version " + fv.id + " listed twice");
      if (fv.failing.empty())
        throw Error(ErrorKind::Data, "fault map: version " + fv.id + " has no failing test");
      map.versions.push_back(std::move(fv));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("fault map: ") + e.what());
  }
  if (map.versions.empty()) throw Error(ErrorKind::Data, "fault map lists no versions");
  return map;
}

FaultMap load_fault_map(const std::filesystem::path& path) {
  return parse_fault_map(read_file(path));
}

std::string serialize_fault_map(const FaultMap& map) {
  ordered_json doc;
  doc["format"] = "tsmin-faultmap";
  doc["version"] = 1;
  ordered_json versions = ordered_json::array();
  for (const auto& v : map.versions) versions.push_back({{"id", v.id}, {"failing", v.failing}});
  doc["versions"] = std::move(versions);
  return dump_json(doc);
}

FdrResult compute_fdr(const FaultMap& faults, const std::vector<Suite>& suites) {
  const Suite* fallback = nullptr;
  std::map<std::string, const Suite*> by_version;
  for (const auto& s : suites) {
    if (!s.version) {
      if (fallback) throw Error(ErrorKind::Data, "more than one suite without a version");
      fallback = &s;
    } else if (!by_version.emplace(*s.version, &s).second) {
      throw Error(ErrorKind::Data, "more than one suite for version " + *s.version);
    }
  }
  FdrResult out;
  for (const auto& v : faults.versions) {
    auto it = by_version.find(v.id);
    const Suite* s = it != by_version.end() ? it->second : fallback;
    if (!s) throw Error(ErrorKind::Data, "no minimized suite for version " + v.id);
    std::set<std::string> roster(s->roster.begin(), s->roster.end());
    std::set<std::string> kept(s->selected.begin(), s->selected.end());
    VersionOutcome o;
    o.id = v.id;
    for (const auto& f : v.failing) {
      if (!roster.count(f))
        throw Error(ErrorKind::Data,
                    "version " + v.id + ": failing test " + f + " is not in the roster");
      if (kept.count(f)) o.detecting.push_back(f);
    }
    o.detected = !o.detecting.empty();
    out.detected += o.detected;
    out.versions.push_back(std::move(o));
  }
  out.fdr = static_cast<double>(out.detected) / static_cast<double>(faults.versions.size());
  return out;
}

Stats describe(std::vector<double> v) {
  Stats s;
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    double h = p * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.min = v.front();
  s.max = v.back();
  s.q1 = q(0.25);
  s.median = q(0.5);
  s.q3 = q(0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

namespace {

double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

}  // namespace

double fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  std::uint64_t r1 = a + b;
  std::uint64_t r2 = c + d;
  if (r1 == 0 || r2 == 0)
    throw Error(ErrorKind::Undefined, "Fisher test needs two non-empty rows");
  std::uint64_t c1 = a + c;
  std::uint64_t n = r1 + r2;
  std::uint64_t lo = c1 > r2 ? c1 - r2 : 0;
  std::uint64_t hi = std::min(r1, c1);
  double base = log_choose(n, c1);
  auto logp = [&](std::uint64_t x) { return log_choose(r1, x) + log_choose(r2, c1 - x) - base; };
  double observed = logp(a);
  // Tables whose probability differs from the observed one only by rounding
  // count as equally likely.
  const double tol = 1e-7;
  double p = 0.0;
  for (std::uint64_t x = lo; x <= hi; ++x) {
    double lx = logp(x);
    if (lx <= observed + tol) p += std::exp(lx);
  }
  return std::min(1.0, p);
}

OddsRatio odds_ratio(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  bool zero = a == 0 || b == 0 || c == 0 || d == 0;
  double k = zero ? 0.5 : 0.0;
  double num = (static_cast<double>(a) + k) * (static_cast<double>(d) + k);
  double den = (static_cast<double>(b) + k) * (static_cast<double>(c) + k);
  return {num / den, zero};
}

EvalReport evaluate(const FaultMap& faults, const std::vector<Suite>& suites, std::string label) {
  std::map<std::uint64_t, std::vector<Suite>> by_seed;
  for (const auto& s : suites) by_seed[s.seed].push_back(s);
  EvalReport r;
  r.label = std::move(label);
  r.versions = faults.versions.size();
  std::vector<double> values;
  for (const auto& [seed, group] : by_seed) {
    r.seeds.push_back({seed, compute_fdr(faults, group)});
    values.push_back(r.seeds.back().result.fdr);
  }
  r.fdr = describe(std::move(values));
  return r;
}

Comparison compare(const EvalReport& a, const EvalReport& b) {
  auto pool = [](const EvalReport& r, std::uint64_t& det, std::uint64_t& miss) {
    det = miss = 0;
    for (const auto& s : r.seeds) {
      det += s.result.detected;
      miss += s.result.versions.size() - s.result.detected;
    }
  };
  Comparison c;
  c.a = a.label;
  c.b = b.label;
  pool(a, c.detected_a, c.missed_a);
  pool(b, c.detected_b, c.missed_b);
  c.p_value = fisher_exact(c.detected_a, c.missed_a, c.detected_b, c.missed_b);
  c.odds = odds_ratio(c.detected_a, c.missed_a, c.detected_b, c.missed_b);
  return c;
}

namespace {

ordered_json stats_json(const Stats& s) {
  return {{"count", s.count}, {"min", s.min},       {"q1", s.q1}, {"median", s.median},
          {"mean", s.mean},   {"q3", s.q3},         {"max", s.max}};
}

}  // namespace

ordered_json report_json(const std::vector<EvalReport>& reports,
                         const std::vector<Comparison>& comparisons) {
  ordered_json doc;
  doc["format"] = "tsmin-eval-report";
  doc["version"] = 1;
  doc["tool_version"] = kToolVersion;
  ordered_json runs = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json run;
    run["label"] = r.label;
    run["versions"] = r.versions;
    ordered_json seeds = ordered_json::array();
    for (const auto& s : r.seeds) {
      ordered_json flags = ordered_json::array();
      for (const auto& v : s.result.versions)
        flags.push_back({{"id", v.id}, {"detected", v.detected}, {"detecting", v.detecting}});
      seeds.push_back({{"seed", s.seed},
                       {"detected", s.result.detected},
                       {"fdr", s.result.fdr},
                       {"per_version", std::move(flags)}});
    }
    run["seeds"] = std::move(seeds);
    run["fdr"] = stats_json(r.fdr);
    runs.push_back(std::move(run));
  }
  doc["runs"] = std::move(runs);
  ordered_json cmp = ordered_json::array();
  for (const auto& c : comparisons) {
    cmp.push_back({{"a", c.a},
                   {"b", c.b},
                   {"counts", {c.detected_a, c.missed_a, c.detected_b, c.missed_b}},
                   {"fisher_p", c.p_value},
                   {"odds_ratio", c.odds.value},
                   {"odds_ratio_corrected", c.odds.corrected}});
  }
  doc["comparisons"] = std::move(cmp);
  return doc;
}

std::string report_table(const std::vector<EvalReport>& reports,
                         const std::vector<Comparison>& comparisons) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %5s %6s %6s %6s %6s %6s %6s\n", "run", "seeds",
                "min", "q1", "mean", "median", "q3", "max");
  out << line;
  for (const auto& r : reports) {
    const Stats& s = r.fdr;
    std::snprintf(line, sizeof line, "%-28s %5zu %6.3f %6.3f %6.3f %6.3f %6.3f %6.3f\n",
                  r.label.c_str(), s.count, s.min, s.q1, s.mean, s.median, s.q3, s.max);
    out << line;
  }
  for (const auto& c : comparisons) {
    std::snprintf(line, sizeof line, "%s vs %s: p = %.4g, odds ratio = %.4g%s\n", c.a.c_str(),
                  c.b.c_str(), c.p_value, c.odds.value, c.odds.corrected ? " (corrected)" : "");
    out << line;
  }
  return out.str();
}

}  // namespace tsmin::eval
