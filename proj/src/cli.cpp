#include "tsmin/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tsmin/error.hpp"

namespace tsmin::cli {

using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string measure_name(sim::Measure m, sim::OverlapMode overlap) {
  std::string s(sim::to_string(m));
  if (m == sim::Measure::Combined && overlap == sim::OverlapMode::LabelHeuristic)
    s += "-heuristic";
  return s;
}

std::string budget_tag(double fraction) {
  std::ostringstream s;
  s << fraction * 100.0;
  std::string t = s.str();
  std::replace(t.begin(), t.end(), '.', 'p');
  return "b" + t;
}

bool allowed_pair(sim::Measure a, sim::Measure b) {
  using sim::Measure;
  auto is = [&](Measure x, Measure y) { return (a == x && b == y) || (a == y && b == x); };
  return is(Measure::TopDown, Measure::BottomUp) ||
         is(Measure::Combined, Measure::TreeEditDistance);
}

std::vector<MatrixMember> members_of(const Roster& r) {
  std::vector<MatrixMember> m;
  for (const auto& t : r.tests) m.push_back({t.id, t.digest});
  return m;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

template <typename T>
T get_as(const ordered_json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error("config: '" + key + "' has the wrong type");
  }
}

void check_keys(const ordered_json& obj, const std::string& where,
                std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) config_error("config: '" + where + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      config_error("config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

// Parses all files in parallel, collecting exceptions per slot so the first
// failure in file order is the one reported.
template <typename Fn>
void for_each_slot(std::size_t count, unsigned jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t k) {
    try {
      fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (jobs <= 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k) guarded(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    for (unsigned t = 0; t < n; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) guarded(k);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  if (measures.empty()) config_error("at least one similarity measure is required");
  if (seeds.empty()) config_error("at least one seed is required");
  if (jobs < 1) config_error("--jobs must be at least 1");
  search::validate(search);
  if (search.algorithm == search::Algorithm::NSGA2) {
    if (measures.size() != 2)
      config_error("nsga2 needs exactly two measures, got " + std::to_string(measures.size()));
    if (measures[0] == measures[1]) config_error("nsga2 needs two different measures");
    if (!any_pair && !allowed_pair(measures[0], measures[1]))
      config_error("nsga2 pairs topdown with bottomup or combined with ted; pass --any-pair "
                   "for other combinations");
  }
}

ordered_json RunConfig::echo() const {
  ordered_json doc;
  doc["corpus"] = corpus.generic_string();
  ordered_json pre;
  pre["assertion_methods"] = preprocess.assertion_method_names;
  pre["logging_receivers"] = preprocess.logging_receiver_patterns;
  pre["logging_methods"] = preprocess.logging_method_names;
  pre["rename_target"] = preprocess.rename_target;
  pre["keep_assertion_args"] = preprocess.keep_assertion_args;
  doc["preprocess"] = std::move(pre);
  ordered_json simj;
  ordered_json ms = ordered_json::array();
  for (auto m : measures) ms.push_back(sim::to_string(m));
  simj["measures"] = std::move(ms);
  simj["overlap"] = overlap == sim::OverlapMode::NodeIdentity ? "identity" : "heuristic";
  doc["similarity"] = std::move(simj);
  ordered_json s;
  s["algorithm"] = search::to_string(search.algorithm);
  s["budget"] = search.budget_fraction;
  s["population_size"] = search.population_size;
  s["crossover_rate"] = search.crossover_rate;
  s["mutation_rate"] = search.mutation_rate;
  s["min_generations"] = search.min_generations;
  s["improvement_epsilon"] = search.improvement_epsilon;
  s["fitness_form"] = search::to_string(search.fitness_form);
  s["seeds"] = seeds;
  s["any_pair"] = any_pair;
  doc["search"] = std::move(s);
  return doc;
}

void RunConfig::merge(const ordered_json& doc) {
  check_keys(doc, "", {"corpus", "out", "cache", "fault_map", "version_id", "jobs",
                       "preprocess", "similarity", "search", "evaluation"});
  if (doc.contains("corpus")) corpus = get_as<std::string>(doc["corpus"], "corpus");
  if (doc.contains("out")) out = get_as<std::string>(doc["out"], "out");
  if (doc.contains("cache")) cache = get_as<std::string>(doc["cache"], "cache");
  if (doc.contains("fault_map")) fault_map = get_as<std::string>(doc["fault_map"], "fault_map");
  if (doc.contains("version_id"))
    version_id = get_as<std::string>(doc["version_id"], "version_id");
  if (doc.contains("jobs")) jobs = get_as<unsigned>(doc["jobs"], "jobs");
  if (doc.contains("preprocess")) {
    const auto& p = doc["preprocess"];
    check_keys(p, "preprocess", {"assertion_methods", "logging_receivers", "logging_methods",
                                 "rename_target", "keep_assertion_args"});
    if (p.contains("assertion_methods"))
      preprocess.assertion_method_names =
          get_as<std::set<std::string>>(p["assertion_methods"], "preprocess.assertion_methods");
    if (p.contains("logging_receivers"))
      preprocess.logging_receiver_patterns = get_as<std::vector<std::string>>(
          p["logging_receivers"], "preprocess.logging_receivers");
    if (p.contains("logging_methods"))
      preprocess.logging_method_names =
          get_as<std::set<std::string>>(p["logging_methods"], "preprocess.logging_methods");
    if (p.contains("rename_target"))
      preprocess.rename_target = get_as<std::string>(p["rename_target"], "preprocess.rename_target");
    if (p.contains("keep_assertion_args"))
      preprocess.keep_assertion_args =
          get_as<bool>(p["keep_assertion_args"], "preprocess.keep_assertion_args");
  }
  if (doc.contains("similarity")) {
    const auto& s = doc["similarity"];
    check_keys(s, "similarity", {"measures", "overlap"});
    if (s.contains("measures")) {
      measures.clear();
      for (const auto& m : get_as<std::vector<std::string>>(s["measures"], "similarity.measures"))
        measures.push_back(sim::parse_measure(m));
    }
    if (s.contains("overlap")) {
      auto o = get_as<std::string>(s["overlap"], "similarity.overlap");
      if (o == "identity")
        overlap = sim::OverlapMode::NodeIdentity;
      else if (o == "heuristic")
        overlap = sim::OverlapMode::LabelHeuristic;
      else
        config_error("config: similarity.overlap must be identity or heuristic");
    }
  }
  if (doc.contains("search")) {
    const auto& s = doc["search"];
    check_keys(s, "search", {"algorithm", "budget", "population_size", "crossover_rate",
                             "mutation_rate", "min_generations", "improvement_epsilon",
                             "fitness_form", "seeds", "any_pair", "random_baseline"});
    if (s.contains("algorithm"))
      search.algorithm = search::parse_algorithm(get_as<std::string>(s["algorithm"], "search.algorithm"));
    if (s.contains("budget")) search.budget_fraction = get_as<double>(s["budget"], "search.budget");
    if (s.contains("population_size"))
      search.population_size = get_as<std::size_t>(s["population_size"], "search.population_size");
    if (s.contains("crossover_rate"))
      search.crossover_rate = get_as<double>(s["crossover_rate"], "search.crossover_rate");
    if (s.contains("mutation_rate"))
      search.mutation_rate = get_as<double>(s["mutation_rate"], "search.mutation_rate");
    if (s.contains("min_generations"))
      search.min_generations = get_as<std::size_t>(s["min_generations"], "search.min_generations");
    if (s.contains("improvement_epsilon"))
      search.improvement_epsilon =
          get_as<double>(s["improvement_epsilon"], "search.improvement_epsilon");
    if (s.contains("fitness_form"))
      search.fitness_form =
          search::parse_fitness_form(get_as<std::string>(s["fitness_form"], "search.fitness_form"));
    if (s.contains("seeds")) seeds = get_as<std::vector<std::uint64_t>>(s["seeds"], "search.seeds");
    if (s.contains("any_pair")) any_pair = get_as<bool>(s["any_pair"], "search.any_pair");
    if (s.contains("random_baseline"))
      random_baseline = get_as<bool>(s["random_baseline"], "search.random_baseline");
  }
  if (doc.contains("evaluation")) {
    const auto& e = doc["evaluation"];
    check_keys(e, "evaluation", {"fault_map", "baseline"});
    if (e.contains("fault_map"))
      fault_map = get_as<std::string>(e["fault_map"], "evaluation.fault_map");
    if (e.contains("baseline")) baseline = get_as<std::string>(e["baseline"], "evaluation.baseline");
  }
}

RunConfig load_config_file(const fs::path& path) {
  RunConfig c;
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    config_error("cannot read config file " + path.string());
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error("config file " + path.string() + ": " + e.what());
  }
  c.merge(doc);
  return c;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto num = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      config_error("bad seed range '" + text + "' (expected A..B)");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      config_error("bad seed range '" + text + "'");
    }
  };
  auto dots = text.find("..");
  if (dots == std::string::npos) return {num(text)};
  std::uint64_t a = num(text.substr(0, dots));
  std::uint64_t b = num(text.substr(dots + 2));
  if (b < a) config_error("seed range '" + text + "' is empty");
  if (b - a >= 100000) config_error("seed range '" + text + "' is too large");
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------
// Artifact names

fs::path roster_path(const RunConfig& c) { return c.out / "tests.json"; }

fs::path matrix_path(const RunConfig& c, sim::Measure m) {
  return c.out / ("simmatrix-" + measure_name(m, c.overlap) + ".json");
}

std::string run_label(const RunConfig& c, search::Algorithm algorithm,
                      const std::vector<sim::Measure>& measures) {
  std::string label(search::to_string(algorithm));
  if (algorithm != search::Algorithm::Random) {
    label += "-";
    for (std::size_t i = 0; i < measures.size(); ++i)
      label += (i ? "+" : "") + measure_name(measures[i], c.overlap);
    if (c.search.fitness_form != search::FitnessForm::MaxSquared)
      label += "-" + std::string(search::to_string(c.search.fitness_form));
  }
  label += "-" + budget_tag(c.search.budget_fraction);
  if (c.version_id) label += "-" + *c.version_id;
  return label;
}

fs::path minimized_path(const RunConfig& c, const std::string& label, std::uint64_t seed) {
  return c.out / ("minimized-" + label + "-seed" + std::to_string(seed) + ".json");
}

// ---------------------------------------------------------------------------
// prepare

PrepareResult cmd_prepare(const RunConfig& c) {
  auto start = Clock::now();
  if (c.corpus.empty()) config_error("prepare needs a corpus directory");
  if (!fs::is_directory(c.corpus))
    throw Error(ErrorKind::Io, "corpus directory " + c.corpus.string() + " does not exist");

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(c.corpus); it != fs::recursive_directory_iterator();
       ++it) {
    if (it->is_regular_file() && it->path().extension() == ".java") files.push_back(it->path());
  }
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return fs::relative(a, c.corpus).generic_string() < fs::relative(b, c.corpus).generic_string();
  });

  std::vector<std::vector<frontend::TestCase>> per_file(files.size());
  std::vector<std::vector<int>> lines(files.size());
  for_each_slot(files.size(), c.jobs, [&](std::size_t k) {
    std::string rel = fs::relative(files[k], c.corpus).generic_string();
    std::vector<frontend::ExtractedMethod> methods;
    try {
      methods = frontend::extract_test_methods(files[k]);
    } catch (const FrontendError& e) {
      throw Error(ErrorKind::Frontend, rel + ": " + e.what());
    }
    for (const auto& m : methods) {
      try {
        per_file[k].push_back(frontend::make_test_case({}, rel, m, c.preprocess));
        lines[k].push_back(m.line);
      } catch (const FrontendError& e) {
        throw Error(ErrorKind::Frontend, rel + ": test " + m.name + " (line " +
                                             std::to_string(m.line) + "): " + e.what());
      }
    }
  });

  // Ids: Stem#method, qualified by the relative path when stems collide,
  // then numbered when a file has several tests of one name.
  struct Item {
    std::size_t file, index;
    std::string stem_id, path_id;
  };
  std::vector<Item> items;
  std::map<std::string, std::size_t> stem_count;
  for (std::size_t k = 0; k < files.size(); ++k) {
    std::string rel = fs::relative(files[k], c.corpus).generic_string();
    std::string noext = rel.substr(0, rel.size() - 5);
    std::string stem = files[k].stem().string();
    for (std::size_t i = 0; i < per_file[k].size(); ++i) {
      const auto& tc = per_file[k][i];
      items.push_back({k, i, stem + "#" + tc.method_name, noext + "#" + tc.method_name});
      ++stem_count[items.back().stem_id];
    }
  }

  PrepareResult res;
  res.files = files.size();
  std::map<std::string, int> used;
  std::error_code ec;
  fs::remove_all(c.out / "asts", ec);
  for (const auto& it : items) {
    auto& tc = per_file[it.file][it.index];
    std::string id = stem_count[it.stem_id] > 1 ? it.path_id : it.stem_id;
    int n = ++used[id];
    std::string suffix = n > 1 ? "@" + std::to_string(n) : "";
    id += suffix;
    std::string rel = fs::relative(files[it.file], c.corpus).generic_string();
    std::string noext = rel.substr(0, rel.size() - 5);
    std::string base = "asts/" + noext + "/" + tc.method_name + suffix;
    write_file(c.out / (base + ".ast.json"), serialize(tc.tree));
    write_file(c.out / (base + ".pre.java"), tc.preprocessed_source + "\n");
    res.roster.tests.push_back(
        {id, rel, tc.method_name, lines[it.file][it.index], base + ".ast.json", tc.digest});
  }
  if (files.empty())
    res.warnings.push_back("no .java files under " + c.corpus.string());
  else if (items.empty())
    res.warnings.push_back("no test methods found under " + c.corpus.string());
  res.roster.config = c.echo();
  res.seconds = since(start);
  if (c.timing) res.roster.ast_seconds = res.seconds;
  save_roster(res.roster, roster_path(c));
  return res;
}

// ---------------------------------------------------------------------------
// similarity

SimilarityResult cmd_similarity(const RunConfig& c) {
  auto start = Clock::now();
  fs::path rp = roster_path(c);
  if (!fs::exists(rp))
    throw Error(ErrorKind::Data, "no roster at " + rp.string() + "; run prepare first");
  Roster roster = load_roster(rp);
  std::vector<AstTree> trees = load_trees(roster, c.out);
  auto members = members_of(roster);

  SimilarityResult res;
  for (sim::Measure m : c.measures) {
    BuildOptions opt;
    opt.measure = m;
    opt.overlap = c.overlap;
    opt.jobs = c.jobs;
    std::optional<SimilarityMatrix> prior;
    std::vector<std::string> notes;
    if (c.cache) {
      fs::path p = *c.cache;
      if (fs::is_directory(p)) p /= matrix_path(c, m).filename();
      if (fs::exists(p))
        prior = load_matrix(p);
      else
        notes.push_back("cache " + p.string() + " not found; scoring every pair");
    }
    if (prior) opt.prior = &*prior;
    BuildReport rep;
    SimilarityMatrix matrix = build_matrix(members, trees, opt, &rep);
    rep.warnings.insert(rep.warnings.begin(), notes.begin(), notes.end());
    fs::path out = matrix_path(c, m);
    save_matrix(matrix, out, c.timing);
    res.files.push_back(out);
    res.reports.push_back(std::move(rep));
  }
  res.seconds = since(start);
  return res;
}

// ---------------------------------------------------------------------------
// minimize

namespace {

void write_minimized(const RunConfig& c, const fs::path& path, const std::string& label,
                     const std::vector<sim::Measure>& measures, std::uint64_t seed,
                     const Roster& roster, const search::MinimizationResult& r) {
  ordered_json doc;
  doc["format"] = "tsmin-minimized";
  doc["version"] = 1;
  doc["tool_version"] = kToolVersion;
  doc["label"] = label;
  doc["algorithm"] = search::to_string(r.algorithm);
  ordered_json ms = ordered_json::array();
  if (r.algorithm != search::Algorithm::Random)
    for (auto m : measures) ms.push_back(measure_name(m, c.overlap));
  doc["measures"] = std::move(ms);
  doc["seed"] = seed;
  doc["version_id"] = c.version_id ? ordered_json(*c.version_id) : ordered_json(nullptr);
  doc["budget_fraction"] = c.search.budget_fraction;
  doc["total"] = r.total;
  doc["budget"] = r.budget;
  std::vector<std::size_t> idx = search::members(r.best);
  ordered_json ids = ordered_json::array();
  for (std::size_t i : idx) ids.push_back(roster.tests[i].id);
  doc["selected"] = std::move(ids);
  doc["selected_indices"] = idx;
  doc["fitness"] = r.best_fitness;
  doc["generations"] = r.generations;
  doc["trace"] = r.trace;
  if (r.algorithm == search::Algorithm::NSGA2) {
    ordered_json front = ordered_json::array();
    for (const auto& cand : r.front)
      front.push_back({{"selected_indices", search::members(cand.bits)}, {"fitness", cand.fitness}});
    doc["front"] = std::move(front);
    doc["designated"] = r.designated;
  }
  ordered_json rj = ordered_json::array();
  for (const auto& t : roster.tests) rj.push_back({{"id", t.id}, {"digest", t.digest.hex()}});
  doc["roster"] = std::move(rj);
  doc["config"] = c.echo();
  if (c.timing) doc["timing"] = {{"search_seconds", r.seconds}};
  write_file(path, dump_json(doc));
}

}  // namespace

MinimizeResult cmd_minimize(const RunConfig& c) {
  fs::path rp = roster_path(c);
  if (!fs::exists(rp))
    throw Error(ErrorKind::Data, "no roster at " + rp.string() + "; run prepare first");
  Roster roster = load_roster(rp);
  auto members = members_of(roster);
  std::size_t total = roster.size();

  auto load = [&](sim::Measure m) {
    fs::path p = matrix_path(c, m);
    if (!fs::exists(p))
      throw Error(ErrorKind::Data, "no " + std::string(sim::to_string(m)) +
                                       " matrix at " + p.string() + "; run similarity first");
    return load_matrix_for(p, members);
  };

  MinimizeResult res;
  auto record = [&](const std::string& label, const std::vector<sim::Measure>& ms,
                    std::uint64_t seed, search::MinimizationResult r) {
    fs::path p = minimized_path(c, label, seed);
    write_minimized(c, p, label, ms, seed, roster, r);
    res.files.push_back(p);
    res.runs.push_back(std::move(r));
  };

  search::SearchConfig cfg = c.search;
  cfg.jobs = c.jobs;
  switch (c.search.algorithm) {
    case search::Algorithm::GA:
      search::budget_size(total, cfg.budget_fraction);
      for (sim::Measure m : c.measures) {
        SimilarityMatrix matrix = load(m);
        search::MatrixView view(matrix.size(), matrix.values());
        std::string label = run_label(c, search::Algorithm::GA, {m});
        for (auto seed : c.seeds) {
          cfg.seed = seed;
          record(label, {m}, seed, search::run_ga(view, cfg));
        }
      }
      break;
    case search::Algorithm::NSGA2: {
      search::budget_size(total, cfg.budget_fraction);
      SimilarityMatrix a = load(c.measures[0]);
      SimilarityMatrix b = load(c.measures[1]);
      search::MatrixView va(a.size(), a.values());
      search::MatrixView vb(b.size(), b.values());
      std::string label = run_label(c, search::Algorithm::NSGA2, c.measures);
      for (auto seed : c.seeds) {
        cfg.seed = seed;
        record(label, c.measures, seed, search::run_nsga2(va, vb, cfg));
      }
      break;
    }
    case search::Algorithm::Random: {
      std::string label = run_label(c, search::Algorithm::Random, {});
      for (auto seed : c.seeds) {
        cfg.seed = seed;
        record(label, {}, seed, search::run_random(total, cfg));
      }
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// evaluate

eval::Suite load_suite(const fs::path& path, std::string* label) {
  ordered_json doc = parse_json(read_file(path), path.string());
  check_format(doc, "tsmin-minimized", 1, path.string());
  eval::Suite s;
  try {
    if (!doc.at("version_id").is_null()) s.version = doc["version_id"].get<std::string>();
    s.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& r : doc.at("roster")) s.roster.push_back(r.at("id").get<std::string>());
    s.selected = doc.at("selected").get<std::vector<std::string>>();
    if (label) *label = doc.at("label").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return s;
}

EvaluateResult cmd_evaluate(const RunConfig& c, std::vector<fs::path> suites) {
  if (!c.fault_map) config_error("evaluate needs --fault-map");
  eval::FaultMap faults = eval::load_fault_map(*c.fault_map);
  if (suites.empty() && fs::is_directory(c.out)) {
    for (const auto& e : fs::directory_iterator(c.out)) {
      std::string name = e.path().filename().string();
      if (name.rfind("minimized-", 0) == 0 && e.path().extension() == ".json")
        suites.push_back(e.path());
    }
    std::sort(suites.begin(), suites.end());
  }
  if (suites.empty()) throw Error(ErrorKind::Data, "no minimized suites to evaluate");

  // Group by run label; strip the per-version tag so that one run over
  // several versions is one report.
  std::vector<std::string> order;
  std::map<std::string, std::vector<eval::Suite>> groups;
  for (const auto& p : suites) {
    std::string label;
    eval::Suite s = load_suite(p, &label);
    if (s.version) {
      std::string tag = "-" + *s.version;
      if (label.size() > tag.size() && label.compare(label.size() - tag.size(), tag.size(), tag) == 0)
        label.erase(label.size() - tag.size());
    }
    if (!groups.count(label)) order.push_back(label);
    groups[label].push_back(std::move(s));
  }

  EvaluateResult res;
  for (const auto& label : order) res.reports.push_back(eval::evaluate(faults, groups[label], label));

  std::string base = c.baseline.value_or("random");
  // The "-b<percent>" part of a label; suffixes after it are ignored.
  auto budget_of = [](const std::string& label) {
    for (auto pos = label.find("-b"); pos != std::string::npos; pos = label.find("-b", pos + 1)) {
      std::size_t end = pos + 2;
      while (end < label.size() && (std::isdigit(static_cast<unsigned char>(label[end])) ||
                                    label[end] == 'p'))
        ++end;
      if (end > pos + 2 && (end == label.size() || label[end] == '-'))
        return label.substr(pos, end - pos);
    }
    return std::string();
  };
  for (const auto& a : res.reports) {
    if (a.label.rfind(base, 0) == 0) continue;
    for (const auto& b : res.reports) {
      if (b.label.rfind(base, 0) != 0 || budget_of(a.label) != budget_of(b.label)) continue;
      res.comparisons.push_back(eval::compare(a, b));
    }
  }

  ordered_json doc = eval::report_json(res.reports, res.comparisons);
  doc["fault_map"] = c.fault_map->generic_string();
  doc["config"] = c.echo();
  res.json_file = c.out / "eval-report.json";
  res.table_file = c.out / "eval-report.txt";
  write_file(res.json_file, dump_json(doc));
  write_file(res.table_file, eval::report_table(res.reports, res.comparisons));
  return res;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<unsigned> jobs;
  bool no_timing = false;
  std::optional<std::string> corpus;
  std::vector<std::string> measures;
  std::optional<std::string> cache;
  bool overlap_heuristic = false;
  std::optional<std::string> algorithm;
  std::optional<double> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> seeds;
  bool any_pair = false;
  std::optional<std::string> version_id;
  std::optional<std::string> fitness_form;
  std::optional<std::string> fault_map;
  std::optional<std::string> baseline;
  bool random_baseline = false;
  std::vector<std::string> suites;
};

void add_common(CLI::App* sc, Flags& f) {
  sc->add_option("-o,--out", f.out, "Artifacts directory (default tsmin-out)");
  sc->add_option("--config", f.config, "JSON config file (default: $TSMIN_CONFIG)");
  sc->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sc->add_flag("--no-timing", f.no_timing, "Leave timing fields out of artifacts");
}

void add_measures(CLI::App* sc, Flags& f) {
  sc->add_option("--measure", f.measures, "topdown, bottomup, combined or ted (repeatable)")
      ->delimiter(',');
  sc->add_flag("--overlap-heuristic", f.overlap_heuristic,
               "Combined measure: label-based overlap instead of node identity");
}

void add_similarity(CLI::App* sc, Flags& f) {
  sc->add_option("--cache", f.cache, "Earlier matrix file or artifacts directory to reuse");
}

void add_search(CLI::App* sc, Flags& f) {
  sc->add_option("--algorithm", f.algorithm, "ga, nsga2 or random");
  sc->add_option("--budget", f.budget, "Fraction of tests to keep, in (0,1)");
  auto* seed = sc->add_option("--seed", f.seed, "Random seed");
  sc->add_option("--seeds", f.seeds, "Seed range A..B")->excludes(seed);
  sc->add_flag("--any-pair", f.any_pair, "Allow any two measures for nsga2");
  sc->add_option("--version-id", f.version_id, "Faulty version this suite is for");
  sc->add_option("--fitness-form", f.fitness_form,
                 "max_squared, max, pairwise_mean or pairwise_mean_squared");
}

void add_eval(CLI::App* sc, Flags& f) {
  sc->add_option("--fault-map", f.fault_map, "faultmap.json");
  sc->add_option("--baseline", f.baseline, "Label prefix of the baseline runs (default random)");
}

RunConfig effective_config(const Flags& f) {
  RunConfig c;
  std::optional<std::string> file = f.config;
  if (!file)
    if (const char* env = std::getenv("TSMIN_CONFIG"); env && *env) file = env;
  if (file) c = load_config_file(*file);
  if (f.out) c.out = *f.out;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.no_timing) c.timing = false;
  if (f.corpus) c.corpus = *f.corpus;
  if (!f.measures.empty()) {
    c.measures.clear();
    for (const auto& m : f.measures) c.measures.push_back(sim::parse_measure(m));
  }
  if (f.overlap_heuristic) c.overlap = sim::OverlapMode::LabelHeuristic;
  if (f.cache) c.cache = *f.cache;
  if (f.algorithm) c.search.algorithm = search::parse_algorithm(*f.algorithm);
  if (f.budget) c.search.budget_fraction = *f.budget;
  if (f.seed) c.seeds = {*f.seed};
  if (f.seeds) c.seeds = parse_seed_range(*f.seeds);
  if (f.any_pair) c.any_pair = true;
  if (f.version_id) c.version_id = *f.version_id;
  if (f.fitness_form) c.search.fitness_form = search::parse_fitness_form(*f.fitness_form);
  if (f.fault_map) c.fault_map = *f.fault_map;
  if (f.baseline) c.baseline = *f.baseline;
  if (f.random_baseline) c.random_baseline = true;
  c.validate();
  return c;
}

std::string fmt_seconds(double s) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(3);
  o << s << " s";
  return o.str();
}

void print_prepare(const PrepareResult& r, std::ostream& out, std::ostream& err) {
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  out << "prepared " << r.roster.size() << " tests from " << r.files << " files in "
      << fmt_seconds(r.seconds) << " (AST time)\n";
}

void print_similarity(const SimilarityResult& r, std::ostream& out, std::ostream& err) {
  for (std::size_t i = 0; i < r.files.size(); ++i) {
    for (const auto& w : r.reports[i].warnings) err << "warning: " << w << "\n";
    out << r.files[i].filename().string() << ": " << r.reports[i].computed_pairs
        << " pairs computed, " << r.reports[i].reused_pairs << " reused\n";
  }
  out << "scoring time " << fmt_seconds(r.seconds) << "\n";
}

void print_minimize(const MinimizeResult& r, std::ostream& out) {
  for (std::size_t i = 0; i < r.files.size(); ++i) {
    const auto& run = r.runs[i];
    out << r.files[i].filename().string() << ": " << run.budget << " of " << run.total
        << " tests";
    if (!run.best_fitness.empty()) {
      out << ", fitness";
      for (double v : run.best_fitness) out << " " << v;
    }
    if (run.generations) out << ", " << run.generations << " generations";
    out << "\n";
  }
}

void print_evaluate(const EvaluateResult& r, std::ostream& out) {
  out << eval::report_table(r.reports, r.comparisons);
  out << "wrote " << r.json_file.string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Similarity-based test suite minimization", "tsmin"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto* prepare = app.add_subcommand("prepare", "Extract test cases and build their ASTs");
  add_common(prepare, f);
  prepare->add_option("corpus", f.corpus, "Directory of Java test sources")->required();

  auto* similarity = app.add_subcommand("similarity", "Score every pair of prepared tests");
  add_common(similarity, f);
  add_measures(similarity, f);
  add_similarity(similarity, f);

  auto* minimize = app.add_subcommand("minimize", "Search for a minimized suite");
  add_common(minimize, f);
  add_measures(minimize, f);
  add_search(minimize, f);

  auto* evaluate = app.add_subcommand("evaluate", "Fault detection rate of minimized suites");
  add_common(evaluate, f);
  add_eval(evaluate, f);
  evaluate->add_option("suites", f.suites, "minimized-*.json files (default: all in --out)");

  auto* all = app.add_subcommand("all", "prepare, similarity, minimize and evaluate");
  add_common(all, f);
  all->add_option("corpus", f.corpus, "Directory of Java test sources")->required();
  add_measures(all, f);
  add_similarity(all, f);
  add_search(all, f);
  add_eval(all, f);
  all->add_flag("--random-baseline", f.random_baseline, "Also minimize with the random baseline");

  auto record = [&](const std::string& kind, const std::string& message) {
    ordered_json rec;
    rec["error"] = {{"kind", kind}, {"message", message}};
    err << rec.dump() << "\n";
  };

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    record("config", e.what());
    return 1;
  }

  try {
    RunConfig c = effective_config(f);
    if (prepare->parsed()) {
      print_prepare(cmd_prepare(c), out, err);
    } else if (similarity->parsed()) {
      print_similarity(cmd_similarity(c), out, err);
    } else if (minimize->parsed()) {
      print_minimize(cmd_minimize(c), out);
    } else if (evaluate->parsed()) {
      std::vector<fs::path> suites(f.suites.begin(), f.suites.end());
      print_evaluate(cmd_evaluate(c, suites), out);
    } else if (all->parsed()) {
      print_prepare(cmd_prepare(c), out, err);
      print_similarity(cmd_similarity(c), out, err);
      print_minimize(cmd_minimize(c), out);
      if (c.random_baseline && c.search.algorithm != search::Algorithm::Random) {
        RunConfig r = c;
        r.search.algorithm = search::Algorithm::Random;
        print_minimize(cmd_minimize(r), out);
      }
      if (c.fault_map) print_evaluate(cmd_evaluate(c), out);
    }
    return 0;
  } catch (const Error& e) {
    record(to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    record("internal", e.what());
    return 2;
  }
}

}  // namespace tsmin::cli
