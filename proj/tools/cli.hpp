#pragma once

// Command-line front end. `run` is callable in-process so the test suite can
// drive it without spawning a shell.
//
// Exit codes: 0 success, 1 runtime or numeric error, 2 usage, config or
// input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tastic/tastic.hpp"

namespace tastic::cli {

using json = nlohmann::json;

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  const auto trimmed = io::detail::trim(text);
  if (trimmed.empty() || trimmed == "none") return out;
  std::size_t col = 0;
  for (auto cell : io::detail::split(trimmed)) {
    ++col;
    try {
      out.push_back(io::detail::parse_real(cell, 0, col));
    } catch (const parse_error&) {
      throw invalid_input(what + ": '" + std::string(cell) + "' is not a number");
    }
  }
  return out;
}

inline std::vector<std::string> parse_words(const std::string& text) {
  std::vector<std::string> out;
  for (auto cell : io::detail::split(text)) {
    if (!cell.empty()) out.emplace_back(cell);
  }
  return out;
}

// Output sink: a file when a path is given, otherwise the supplied stream.
// Content is buffered and written in one go so a failed run leaves no
// partial file.
class Sink {
 public:
  Sink(std::string path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}
  std::ostream& stream() { return buf_; }
  void commit() {
    if (path_.empty() || path_ == "-") {
      fallback_ << buf_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw invalid_input("cannot write '" + path_ + "'");
    f << buf_.str();
    if (!f) throw std::runtime_error("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buf_;
};

// Config file: either a JSON object or `key = value` lines (`#` comments).
// Keys are long option names without dashes. Arrays join into comma lists;
// `true` turns a flag on.
inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::map<std::string, std::string> out;

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw invalid_input("config '" + path + "': " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) {
        out[key] = value.get<std::string>();
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) {
          if (!joined.empty()) joined += ',';
          joined += v.is_string() ? v.get<std::string>() : v.dump();
        }
        out[key] = joined;
      } else if (value.is_boolean() || value.is_number()) {
        out[key] = value.dump();
      } else {
        throw invalid_input("config '" + path + "': unsupported value for '" + key + "'");
      }
    }
    return out;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto t = io::detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw invalid_input("config '" + path + "' line " + std::to_string(row) +
                          ": expected key = value");
    }
    out[std::string(io::detail::trim(t.substr(0, eq)))] =
        std::string(io::detail::trim(t.substr(eq + 1)));
  }
  return out;
}

// Splices config entries into argv as `--key=value` right after the
// subcommand. Options given explicitly on the command line win.
inline std::vector<std::string> apply_config(std::vector<std::string> args,
                                             const std::vector<std::string>& subcommands) {
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;

  auto sub = std::find_first_of(args.begin() + 1, args.end(), subcommands.begin(),
                                subcommands.end());
  if (sub == args.end()) throw invalid_input("--config needs a subcommand");
  auto given = [&](const std::string& key) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(*path)) {
    if (given(key)) continue;
    if (value == "true") {
      extra.push_back("--" + key);
    } else if (value != "false") {
      extra.push_back("--" + key + "=" + value);
    }
  }
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

// Options shared by the measure-driven subcommands.
struct MeasureOptions {
  std::string input;
  std::string measure = "tastic";
  std::size_t L = 3;
  std::optional<double> epsilon;
  std::string E;
  double C = 0.0;
  std::optional<double> alpha;
  std::optional<double> p;
  unsigned threads = 1;
  CLI::Option* threads_opt = nullptr;

  void add_to(CLI::App& app) {
    app.add_option("input", input, "Dataset CSV (id[,label],t1..tT)")->required();
    app.add_option("--measure", measure,
                   "tastic, euclidean, euclidean_tt, pearson, pearson_tt, pearson_tt_trend")
        ->capture_default_str();
    app.add_option("--L", L, "Largest time shift")->capture_default_str();
    auto* eps = app.add_option("--epsilon", epsilon, "Tilt step; expands to {-eps, 0, eps}");
    app.add_option("--E", E, "Explicit comma-separated tilt list (must contain 0)")
        ->excludes(eps);
    app.add_option("--C", C, "Tilt penalty coefficient")->capture_default_str();
    auto* a = app.add_option("--alpha", alpha, "Fixed correlation weight in [0, 1]");
    app.add_option("--p", p, "Percentile order for the default alpha (default 0.09)")
        ->excludes(a);
    threads_opt = app.add_option("--threads", threads,
                                 "Worker threads for the pairwise matrix (env TASTIC_THREADS)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  // The flag wins over TASTIC_THREADS. CLI11 skips env values that fail
  // validation, so the variable is checked here.
  unsigned thread_count() const {
    if (threads_opt && threads_opt->count() > 0) return threads;
    const char* env = std::getenv("TASTIC_THREADS");
    if (!env || !*env) return threads;
    const std::string_view v(env);
    unsigned n = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || end != v.data() + v.size() || n == 0) {
      throw invalid_input("TASTIC_THREADS: '" + std::string(v) + "' is not a positive integer");
    }
    return n;
  }

  Measure parsed_measure() const {
    const auto m = parse_measure(measure);
    if (!m) throw invalid_input("unknown measure '" + measure + "'");
    return *m;
  }

  TravelParams travel() const {
    TravelParams t;
    t.max_shift = L;
    if (epsilon) t.tilts = TravelParams::symmetric_tilts(*epsilon);
    if (!E.empty()) t.tilts = parse_list(E, "--E");
    t.tilt_penalty = C;
    return t;
  }

  AlphaSpec alpha_spec() const {
    if (alpha) return AlphaSpec::fixed(*alpha);
    return AlphaSpec::from_percentile(p.value_or(0.09));
  }
};

struct Resolved {
  io::LoadedDataset loaded;
  Measure measure;
  TravelParams params;
  AlphaSpec alpha;
  DissimilarityMatrix matrix;
};

inline Resolved build_matrix(const MeasureOptions& o) {
  Resolved r{io::load_dataset(o.input), o.parsed_measure(), o.travel(), o.alpha_spec(), {}};
  r.alpha.validate();
  if (r.measure == Measure::tastic) r.params.corr_weight = resolve_alpha(r.alpha, r.loaded.data);
  r.matrix = dissim_matrix(r.loaded.data, r.measure, r.params, o.thread_count());
  return r;
}

inline json alpha_json(const Resolved& r) {
  json j;
  if (r.measure != Measure::tastic) {
    j["alpha"] = nullptr;
    return j;
  }
  j["alpha"] = r.params.corr_weight;
  if (r.alpha.mode == AlphaSpec::Mode::percentile) {
    j["alpha_source"] = "percentile";
    j["p"] = r.alpha.value;
  } else {
    j["alpha_source"] = "fixed";
  }
  return j;
}

inline Linkage to_linkage(const std::string& name) {
  const auto l = parse_linkage(name);
  if (!l) throw invalid_input("unknown linkage '" + name + "'");
  return *l;
}

inline GeneratorSpec spec_from_json(const json& j) {
  GeneratorSpec s;
  if (j.contains("preset")) {
    auto p = preset(j.at("preset").get<std::string>());
    if (!p) throw invalid_input("unknown preset '" + j.at("preset").get<std::string>() + "'");
    s = *p;
  }
  s.benchmark_class = j.value("class", s.benchmark_class);
  s.length = j.value("length", s.length);
  s.shift_range = j.value("shift_range", s.shift_range);
  s.seed = j.value("seed", s.seed);
  if (j.contains("clusters")) {
    s.recipes.clear();
    for (const auto& c : j.at("clusters")) {
      ClusterRecipe r;
      r.count = c.value("count", r.count);
      r.level = c.value("level", r.level);
      r.trend = c.value("trend", r.trend);
      r.amplitude = c.value("amplitude", r.amplitude);
      r.period = c.value("period", r.period);
      r.phase = c.value("phase", r.phase);
      r.noise_sd = c.value("noise_sd", r.noise_sd);
      r.level_jitter = c.value("level_jitter", r.level_jitter);
      r.trend_jitter = c.value("trend_jitter", r.trend_jitter);
      s.recipes.push_back(r);
    }
  }
  return s;
}

// A preset name or a path to a JSON generator spec.
inline GeneratorSpec load_generator_spec(const std::string& what) {
  if (auto p = preset(what)) return *p;
  std::ifstream in(what);
  if (!in) {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw invalid_input("'" + what + "' is neither a preset (" + names + ") nor a readable file");
  }
  try {
    return spec_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw invalid_input("generator spec '" + what + "': " + e.what());
  }
}

// Truth/prediction labels aligned to a list of series ids. Files that carry
// ids must list the same ids; rows are matched by id.
inline ClusterLabels align_labels(const io::LoadedLabels& l, const std::vector<std::string>& ids) {
  if (l.raw.size() != ids.size()) {
    throw shape_error("label file has " + std::to_string(l.raw.size()) + " rows, expected " +
                      std::to_string(ids.size()));
  }
  if (l.ids == ids) return l.labels;
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < l.ids.size(); ++i) pos[l.ids[i]] = i;
  std::vector<std::string> raw;
  raw.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) throw shape_error("no label for series '" + id + "'");
    raw.push_back(l.raw[it->second]);
  }
  return io::labels_from_strings(raw);
}

inline std::string bin_name(const std::vector<double>& edges, std::size_t b) {
  const std::string lo = b == 0 ? "-inf" : io::format_real(edges[b - 1]);
  const std::string hi = b == edges.size() ? "inf" : io::format_real(edges[b]);
  return "[" + lo + "," + hi + ")";
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Time- and trend-traveling dissimilarity clustering for time series", "tastic"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  app.footer("Any subcommand accepts --config FILE (JSON object or key = value lines).");

  // gen
  std::string gen_spec;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic benchmark dataset");
  gen->add_option("spec", gen_spec, "Preset name (G1_1..G3_3) or JSON generator spec")
      ->required();
  gen->add_option("--seed", gen_seed, "Random seed (default 1, or the spec's seed)");
  gen->add_option("--out,-o", gen_out, "Output CSV (default stdout)");

  // distmat
  detail::MeasureOptions dm;
  std::string dm_out;
  auto* distmat = app.add_subcommand("distmat", "Pairwise dissimilarity matrix");
  dm.add_to(*distmat);
  distmat->add_option("--out,-o", dm_out, "Output CSV (default stdout)");

  // cluster
  detail::MeasureOptions cl;
  std::size_t cl_k = 2;
  std::string cl_linkage = "average";
  std::string cl_out;
  std::string cl_summary;
  auto* cluster = app.add_subcommand("cluster", "Hierarchical clustering cut at k clusters");
  cl.add_to(*cluster);
  cluster->add_option("--k", cl_k, "Number of clusters")->required();
  cluster->add_option("--linkage", cl_linkage, "single, complete or average")
      ->capture_default_str();
  cluster->add_option("--out,-o", cl_out, "Labels CSV (default stdout)");
  cluster->add_option("--summary", cl_summary, "Summary JSON (default stderr)");

  // elbow
  detail::MeasureOptions el;
  std::size_t el_kmin = 2;
  std::size_t el_kmax = 10;
  std::string el_linkage = "average";
  std::string el_out;
  auto* elbow = app.add_subcommand("elbow", "Within-cluster dissimilarity for k in [kmin, kmax]");
  el.add_to(*elbow);
  elbow->add_option("--kmin", el_kmin)->capture_default_str();
  elbow->add_option("--kmax", el_kmax, "Capped at the number of series")->capture_default_str();
  elbow->add_option("--linkage", el_linkage)->capture_default_str();
  elbow->add_option("--out,-o", el_out, "Output CSV (default stdout)");

  // eval
  std::string ev_pred, ev_truth, ev_out;
  auto* eval = app.add_subcommand("eval", "Accuracy and ARI of a labelling against the truth");
  eval->add_option("pred", ev_pred, "Predicted labels CSV (id,label)")->required();
  eval->add_option("truth", ev_truth, "Truth labels CSV, or dataset CSV with a label column")
      ->required();
  eval->add_option("--out,-o", ev_out, "Output JSON (default stdout)");

  // profile
  std::string pr_input, pr_labels, pr_out;
  std::string pr_thresholds = "6.5,7,10";
  std::string pr_bins = "6.5,7,8,9,10";
  std::optional<double> pr_epsilon;
  std::string pr_E;
  auto* prof = app.add_subcommand("profile", "Per-group descriptive profiles");
  prof->add_option("input", pr_input, "Dataset CSV")->required();
  prof->add_option("--labels", pr_labels, "Labels CSV (default: the dataset's label column)");
  prof->add_option("--thresholds", pr_thresholds, "Comma list; empty or 'none' for no counts")
      ->capture_default_str();
  prof->add_option("--bins", pr_bins, "Interior bin edges, comma list")->capture_default_str();
  auto* pr_eps = prof->add_option("--epsilon", pr_epsilon, "Tilt step for within-group correlation");
  prof->add_option("--E", pr_E, "Explicit tilt list")->excludes(pr_eps);
  prof->add_option("--out,-o", pr_out, "Output JSON (default stdout)");

  // compare
  detail::MeasureOptions cm;
  std::string cm_truth, cm_methods, cm_linkage = "average", cm_out;
  std::uint64_t cm_seed = 1;
  std::size_t cm_restarts = 10;
  auto* compare = app.add_subcommand("compare", "Score several methods against the truth");
  cm.add_to(*compare);
  compare->add_option("--truth", cm_truth, "Truth labels CSV (default: the dataset's label column)");
  compare->add_option("--methods", cm_methods, "Comma list (default: all)");
  compare->add_option("--linkage", cm_linkage)->capture_default_str();
  compare->add_option("--seed", cm_seed, "k-means seed")->capture_default_str();
  compare->add_option("--restarts", cm_restarts, "k-means restarts")->capture_default_str();
  compare->add_option("--out,-o", cm_out, "Output CSV (default stdout)");

  try {
    std::vector<std::string> args(argv, argv + argc);
    std::vector<std::string> names;
    for (const auto* s : app.get_subcommands({})) names.push_back(s->get_name());
    args = detail::apply_config(std::move(args), names);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const invalid_input& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*gen) {
      auto spec = detail::load_generator_spec(gen_spec);
      if (gen_seed) spec.seed = *gen_seed;
      const auto g = generate(spec);
      detail::Sink sink(gen_out, out);
      io::write_dataset(sink.stream(), g.data, &g.truth);
      sink.commit();
    } else if (*distmat) {
      const auto r = detail::build_matrix(dm);
      detail::Sink sink(dm_out, out);
      io::write_matrix(sink.stream(), r.matrix);
      sink.commit();
    } else if (*cluster) {
      const Linkage linkage = detail::to_linkage(cl_linkage);
      const auto loaded = io::load_dataset(cl.input);
      if (cl_k < 1 || cl_k > loaded.data.size()) {
        throw bad_range("k=" + std::to_string(cl_k) + " must lie in [1, " +
                        std::to_string(loaded.data.size()) + "]");
      }
      ClusterLabels labels;
      json summary;
      if (loaded.data.size() == 1) {
        validate_dataset(loaded.data);
        labels = ClusterLabels::from_raw({1});
        summary["alpha"] = nullptr;
        summary["wcd"] = 0.0;
        summary["measure"] = cl.measure;
      } else {
        const auto r = detail::build_matrix(cl);
        const auto tree = agglomerate(r.matrix, linkage);
        labels = cut(tree, cl_k);
        summary = detail::alpha_json(r);
        summary["wcd"] = wcd(r.matrix, labels);
        summary["measure"] = r.matrix.method;
        if (!tree.monotone()) summary["inversions"] = true;
      }
      summary["k"] = labels.k;
      summary["linkage"] = linkage_name(linkage);
      summary["sizes"] = labels.cluster_sizes();
      detail::Sink sink(cl_out, out);
      io::write_labels(sink.stream(), loaded.data, labels);
      detail::Sink sum(cl_summary, err);
      sum.stream() << summary.dump(2) << '\n';
      sink.commit();
      sum.commit();
    } else if (*elbow) {
      const Linkage linkage = detail::to_linkage(el_linkage);
      const auto r = detail::build_matrix(el);
      const auto kmax = std::min(el_kmax, r.matrix.n);
      const auto curve = elbow_curve(r.matrix, linkage, el_kmin, kmax);
      detail::Sink sink(el_out, out);
      io::write_elbow(sink.stream(), curve);
      sink.commit();
    } else if (*eval) {
      const auto pred = io::load_labels(ev_pred);
      const auto truth = io::load_labels(ev_truth);
      const auto t = detail::align_labels(truth, pred.ids);
      json j{{"accuracy", accuracy(pred.labels, t)}, {"ari", ari(pred.labels, t)}};
      detail::Sink sink(ev_out, out);
      sink.stream() << j.dump(2) << '\n';
      sink.commit();
    } else if (*prof) {
      const auto loaded = io::load_dataset(pr_input);
      std::vector<std::string> ids;
      for (const auto& s : loaded.data) ids.push_back(s.id);
      ClusterLabels labels;
      if (!pr_labels.empty()) {
        labels = detail::align_labels(io::load_labels(pr_labels), ids);
      } else if (loaded.truth) {
        labels = *loaded.truth;
      } else {
        throw invalid_input("no labels: pass --labels or a dataset with a label column");
      }
      ProfileOptions opts;
      opts.thresholds = detail::parse_list(pr_thresholds, "--thresholds");
      opts.bin_edges = detail::parse_list(pr_bins, "--bins");
      if (pr_epsilon) opts.tilts = TravelParams::symmetric_tilts(*pr_epsilon);
      if (!pr_E.empty()) opts.tilts = detail::parse_list(pr_E, "--E");
      const auto groups = profile(loaded.data, labels, opts);

      json bins = json::array();
      for (std::size_t b = 0; b <= opts.bin_edges.size(); ++b) {
        bins.push_back(detail::bin_name(opts.bin_edges, b));
      }
      json jg = json::array();
      for (const auto& g : groups) {
        json e{{"group", g.group},
               {"size", g.size},
               {"mean_last3", g.mean_last3},
               {"mean_max", g.mean_max},
               {"mean_argmax", g.mean_argmax},
               {"max_histogram", g.max_histogram},
               {"last3_histogram", g.last3_histogram},
               {"pairs", g.pairs}};
        if (!opts.thresholds.empty()) {
          json counts = json::array();
          for (std::size_t h = 0; h < opts.thresholds.size(); ++h) {
            counts.push_back({{"threshold", opts.thresholds[h]},
                              {"mean_count", g.mean_count_at_least[h]}});
          }
          e["counts_at_least"] = counts;
        }
        e["mean_within_corr"] = g.mean_within_corr ? json(*g.mean_within_corr) : json(nullptr);
        e["frac_corr_at_least"] =
            g.frac_corr_at_least ? json(*g.frac_corr_at_least) : json(nullptr);
        jg.push_back(e);
      }
      json j{{"bins", bins}, {"corr_level", opts.corr_level}, {"tilts", opts.tilts},
             {"groups", jg}};
      detail::Sink sink(pr_out, out);
      sink.stream() << j.dump(2) << '\n';
      sink.commit();
    } else if (*compare) {
      const auto loaded = io::load_dataset(cm.input);
      std::vector<std::string> ids;
      for (const auto& s : loaded.data) ids.push_back(s.id);
      ClusterLabels truth;
      if (!cm_truth.empty()) {
        truth = detail::align_labels(io::load_labels(cm_truth), ids);
      } else if (loaded.truth) {
        truth = *loaded.truth;
      } else {
        throw invalid_input("no truth: pass --truth or a dataset with a label column");
      }
      std::vector<Method> methods;
      if (cm_methods.empty()) {
        methods = all_methods();
      } else {
        for (const auto& w : detail::parse_words(cm_methods)) {
          const auto m = parse_method(w);
          if (!m) throw invalid_input("unknown method '" + w + "'");
          methods.push_back(*m);
        }
      }
      CompareConfig cfg;
      cfg.travel = cm.travel();
      cfg.alpha = cm.alpha_spec();
      cfg.linkage = detail::to_linkage(cm_linkage);
      cfg.seed = cm_seed;
      cfg.restarts = cm_restarts;
      cfg.threads = cm.thread_count();
      const auto scores = compare_methods(loaded.data, truth, methods, cfg);
      detail::Sink sink(cm_out, out);
      sink.stream() << "method,accuracy,ari\n";
      for (const auto& s : scores) {
        sink.stream() << method_name(s.method) << ',' << io::format_real(s.accuracy) << ','
                      << io::format_real(s.ari) << '\n';
      }
      sink.commit();
    }
  } catch (const invalid_input& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tastic::cli
