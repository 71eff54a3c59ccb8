#include "tsmin/sim_matrix.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "tsmin/artifacts.hpp"
#include "tsmin/error.hpp"

namespace tsmin {

namespace {

using nlohmann::ordered_json;
using PairKey = std::pair<Digest, Digest>;

PairKey key_of(const Digest& a, const Digest& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

std::string_view overlap_name(sim::OverlapMode m) {
  return m == sim::OverlapMode::NodeIdentity ? "identity" : "heuristic";
}

sim::OverlapMode overlap_from(std::string_view s) {
  if (s == "identity") return sim::OverlapMode::NodeIdentity;
  if (s == "heuristic") return sim::OverlapMode::LabelHeuristic;
  throw Error(ErrorKind::Parse, "similarity matrix: unknown overlap mode '" +
                                    std::string(s) + "'");
}

sim::Rational parse_rational(const std::string& s, std::size_t i, std::size_t j) {
  auto fail = [&]() -> sim::Rational {
    throw Error(ErrorKind::Parse, "similarity matrix: bad entry '" + s + "' at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) return fail();
  sim::Rational r;
  const char* b = s.data();
  const char* e = b + s.size();
  auto r1 = std::from_chars(b, b + slash, r.num);
  auto r2 = std::from_chars(b + slash + 1, e, r.den);
  if (r1.ec != std::errc{} || r1.ptr != b + slash || r2.ec != std::errc{} || r2.ptr != e)
    return fail();
  if (r.den == 0 || r.num > r.den)
    throw Error(ErrorKind::Data, "similarity matrix: entry '" + s + "' outside [0,1]");
  return r;
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::vector<MatrixMember> roster, sim::Measure measure,
                                   sim::OverlapMode overlap)
    : roster_(std::move(roster)), measure_(measure), overlap_(overlap) {
  std::size_t n = roster_.size();
  exact_.assign(n * n, sim::Rational{0, 1});
  values_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    exact_[i * n + i] = {1, 1};
    values_[i * n + i] = 1.0;
  }
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, sim::Rational r) {
  std::size_t n = size();
  exact_[i * n + j] = r;
  exact_[j * n + i] = r;
  values_[i * n + j] = r.value();
  values_[j * n + i] = r.value();
}

bool SimilarityMatrix::same_content(const SimilarityMatrix& other) const {
  return roster_ == other.roster_ && measure_ == other.measure_ &&
         overlap_ == other.overlap_ && exact_ == other.exact_;
}

SimilarityMatrix build_matrix(const std::vector<MatrixMember>& roster,
                              const std::vector<AstTree>& trees,
                              const BuildOptions& options, BuildReport* report) {
  if (roster.size() != trees.size())
    throw Error(ErrorKind::Data, "roster and tree list differ in length");
  BuildReport local;
  BuildReport& rep = report ? *report : local;
  rep = {};

  auto start = std::chrono::steady_clock::now();
  SimilarityMatrix m(roster, options.measure, options.overlap);
  std::size_t n = roster.size();

  std::map<PairKey, sim::Rational> cache;
  if (options.prior) {
    const SimilarityMatrix& p = *options.prior;
    if (p.measure() != options.measure || p.overlap() != options.overlap) {
      rep.warnings.push_back("cache ignored: it holds " +
                             std::string(sim::to_string(p.measure())) +
                             " scores, requested " +
                             std::string(sim::to_string(options.measure)));
    } else {
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
          cache.emplace(key_of(p.roster()[i].digest, p.roster()[j].digest), p.exact(i, j));
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> todo;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto it = cache.find(key_of(roster[i].digest, roster[j].digest));
      if (it != cache.end()) {
        m.set(i, j, it->second);
        ++rep.reused_pairs;
      } else {
        todo.emplace_back(i, j);
      }
    }
  }

  std::vector<sim::Rational> results(todo.size());
  sim::ScoreOptions so{options.overlap};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      auto [i, j] = todo[k];
      results[k] = sim::score_pair(trees[i], trees[j], options.measure, so).exact;
    }
  };
  unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1 || todo.size() < 2) {
    worker();
  } else {
    std::vector<std::thread> pool;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(jobs, todo.size()));
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < todo.size(); ++k) m.set(todo[k].first, todo[k].second, results[k]);
  rep.computed_pairs = todo.size();
  m.scoring_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

std::string serialize_matrix(const SimilarityMatrix& m, bool include_timing) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"tsmin-simmatrix\",\n";
  out << "  \"version\": 1,\n";
  out << "  \"tool_version\": " << ordered_json(kToolVersion).dump() << ",\n";
  out << "  \"measure\": \"" << sim::to_string(m.measure()) << "\",\n";
  out << "  \"overlap\": \"" << overlap_name(m.overlap()) << "\",\n";
  out << "  \"size\": " << m.size() << ",\n";
  out << "  \"roster\": [";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << (i ? ",\n" : "\n") << "    {\"id\": " << ordered_json(m.roster()[i].id).dump()
        << ", \"digest\": \"" << m.roster()[i].digest.hex() << "\"}";
  }
  out << (m.size() ? "\n  ],\n" : "],\n");
  out << "  \"upper\": [";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << (i ? ",\n" : "\n") << "    [";
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto& r = m.exact(i, j);
      out << (j > i + 1 ? ", " : "") << '"' << r.num << '/' << r.den << '"';
    }
    out << "]";
  }
  out << (m.size() ? "\n  ]" : "]");
  if (include_timing && m.scoring_seconds) {
    out << ",\n  \"timing\": {\"scoring_seconds\": " << ordered_json(*m.scoring_seconds).dump()
        << "}";
  }
  out << "\n}\n";
  return out.str();
}

SimilarityMatrix deserialize_matrix(std::string_view text) {
  ordered_json doc = parse_json(text, "similarity matrix");
  check_format(doc, "tsmin-simmatrix", 1, "similarity matrix");
  try {
    auto measure = sim::measure_from_string(doc.at("measure").get<std::string>());
    if (!measure) throw Error(ErrorKind::Parse, "similarity matrix: unknown measure");
    auto overlap = overlap_from(doc.at("overlap").get<std::string>());
    std::vector<MatrixMember> roster;
    for (const auto& r : doc.at("roster"))
      roster.push_back({r.at("id").get<std::string>(),
                        Digest::from_hex(r.at("digest").get<std::string>())});
    std::size_t n = roster.size();
    if (doc.at("size").get<std::size_t>() != n)
      throw Error(ErrorKind::Parse, "similarity matrix: size does not match roster");
    const auto& upper = doc.at("upper");
    if (!upper.is_array() || upper.size() != n)
      throw Error(ErrorKind::Parse, "similarity matrix: expected " + std::to_string(n) +
                                        " rows in \"upper\"");
    SimilarityMatrix m(std::move(roster), *measure, overlap);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = upper[i];
      if (!row.is_array() || row.size() != n - 1 - i)
        throw Error(ErrorKind::Parse,
                    "similarity matrix: row " + std::to_string(i) + " has the wrong length");
      for (std::size_t j = i + 1; j < n; ++j)
        m.set(i, j, parse_rational(row[j - i - 1].get<std::string>(), i, j));
    }
    if (doc.contains("timing"))
      m.scoring_seconds = doc["timing"].at("scoring_seconds").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("similarity matrix: ") + e.what());
  }
}

void save_matrix(const SimilarityMatrix& m, const std::filesystem::path& path,
                 bool include_timing) {
  write_file(path, serialize_matrix(m, include_timing));
}

SimilarityMatrix load_matrix(const std::filesystem::path& path) {
  return deserialize_matrix(read_file(path));
}

SimilarityMatrix load_matrix_for(const std::filesystem::path& path,
                                 const std::vector<MatrixMember>& expected) {
  SimilarityMatrix m = load_matrix(path);
  if (m.size() != expected.size())
    throw Error(ErrorKind::Stale, path.string() + " covers " + std::to_string(m.size()) +
                                      " tests, the roster has " +
                                      std::to_string(expected.size()));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& a = m.roster()[i];
    const auto& b = expected[i];
    if (a.id != b.id)
      throw Error(ErrorKind::Stale, path.string() + ": position " + std::to_string(i) +
                                        " is " + a.id + ", the roster has " + b.id);
    if (a.digest != b.digest)
      throw Error(ErrorKind::Stale, path.string() + ": test " + a.id +
                                        " has changed since the matrix was built");
  }
  return m;
}

}  // namespace tsmin
