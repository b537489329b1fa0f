#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "georef/errors.hpp"
#include "georef/evaluation.hpp"
#include "georef/geojson.hpp"
#include "georef/pipeline.hpp"
#include "georef/text.hpp"

namespace georef::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kNoAnchors = 2;
constexpr int kBadInput = 3;

struct RunOptions {
  std::string graph;
  std::string gazetteer;
  std::string dict;
  std::string out;
  std::string weights = "0.7,0.3";
  double threshold = 0.7;
  double delta_d = 100.0;
  double near_alpha = 100.0;
  double near_beta = 1e-3;
  double near_gamma = 5e-5;
  bool no_promotion = false;
  bool strict = false;
  bool projected = false;
  std::string dump_alr;
  std::string dump_kfunction;
  std::string dump_clusters;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> frames;
  std::string config;
};

struct EvalOptions {
  std::string results;
  std::string annotations;
  std::string graph;
  std::string gazetteer;
  std::string thresholds = "0.0:1.0:0.1";
  std::string out;
};

struct Inputs {
  GraphLoad graph;
  Gazetteer gazetteer;
  std::optional<SemanticDictionary> dict;
  PipelineConfig config;
};

std::string read_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + std::string(what) + " '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double parse_number(std::string_view text, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("bad " + std::string(what) + ": '" + std::string(text) + "'");
}

MatchWeights parse_weights(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("--weights expects 'reference,spatial'");
  return MatchWeights::normalized(parse_number(text.substr(0, comma), "weight"),
                                  parse_number(text.substr(comma + 1), "weight"));
}

std::vector<double> parse_thresholds(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw ValidationError("--thresholds expects first:last:step");
  return threshold_range(parse_number(text.substr(0, a), "threshold"),
                         parse_number(text.substr(a + 1, b - a - 1), "threshold"),
                         parse_number(text.substr(b + 1), "threshold step"));
}

void add_run_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--graph", o.graph, "Place graph JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--gazetteer", o.gazetteer, "Gazetteer GeoJSON FeatureCollection")->required()->check(CLI::ExistingFile);
  sub->add_option("--dict", o.dict, "Semantic dictionary TSV (default: shipped dictionary)")->check(CLI::ExistingFile);
  sub->add_option("--weights", o.weights, "Reference and spatial weights, normalized to sum to 1")
      ->capture_default_str();
  sub->add_option("--threshold", o.threshold, "Overall similarity needed to accept a best match")
      ->capture_default_str();
  sub->add_option("--delta-d", o.delta_d, "K-function interval width in meters")->capture_default_str();
  sub->add_option("--near-alpha", o.near_alpha, "Near buffer constant term (m)")->capture_default_str();
  sub->add_option("--near-beta", o.near_beta, "Near buffer factor on relatum area (1/m)")->capture_default_str();
  sub->add_option("--near-gamma", o.near_gamma, "Near buffer factor on context area (1/m)")->capture_default_str();
  sub->add_flag("--no-promotion", o.no_promotion, "Do not reuse accepted best matches as relata");
  sub->add_option("--jobs", o.jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
  sub->add_flag("--strict", o.strict, "Reject graphs with unknown relation phrases");
  sub->add_flag("--projected", o.projected, "Gazetteer coordinates are planar meters, not lon/lat");
  sub->add_option("--frame", o.frames, "Front bearing of a place, id=degrees clockwise from north (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  // Read by expand_config before parsing; parsed here only to land in the manifest.
  sub->add_option("--config", o.config, "File of `key = value` option defaults; command-line flags take precedence");
}

Inputs load_inputs(const RunOptions& o, std::ostream& err) {
  GraphLoadOptions gopts;
  gopts.strict = o.strict;
  Inputs in{load_place_graph(read_file(o.graph, "graph"), gopts),
            load_gazetteer(read_file(o.gazetteer, "gazetteer"), GazetteerOptions{o.projected}),
            std::nullopt,
            {}};
  for (const auto& w : in.graph.warnings) err << "warning: " << w << "\n";
  if (!o.dict.empty()) in.dict = SemanticDictionary::from_tsv(read_file(o.dict, "dictionary"));

  auto& cfg = in.config;
  cfg.delta_d = o.delta_d;
  cfg.spatial.near = {o.near_alpha, o.near_beta, o.near_gamma};
  cfg.weights = parse_weights(o.weights);
  cfg.threshold = o.threshold;
  cfg.promotion = !o.no_promotion;
  cfg.jobs = o.jobs;
  for (const auto& f : o.frames) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--frame expects id=degrees, got '" + f + "'");
    cfg.front_bearings[f.substr(0, eq)] = parse_number(f.substr(eq + 1), "frame bearing");
  }
  cfg.validate();
  return in;
}

void bind_dictionary(Inputs& in) {
  in.config.dictionary = in.dict ? &*in.dict : nullptr;
}

CoordinateMap output_map(const Gazetteer& gaz) {
  if (!gaz.projection()) return {};
  return [p = *gaz.projection()](const Point& xy) { return p.inverse(xy); };
}

json manifest(const RunOptions& o, const Inputs& in, const std::string& results_text) {
  const auto input = [](const std::string& path, std::string_view what) -> json {
    if (path.empty()) return nullptr;
    return {{"path", path}, {"fnv1a64", fnv1a64(read_file(path, what))}};
  };
  const auto& cfg = in.config;
  json frames = json::object();
  for (const auto& [id, deg] : cfg.front_bearings) frames[id] = deg;
  return {
      {"tool", "georef"},
      {"version", GEOREF_VERSION},
      {"inputs",
       {{"graph", input(o.graph, "graph")},
        {"gazetteer", input(o.gazetteer, "gazetteer")},
        {"dictionary", input(o.dict, "dictionary")},
        {"config", input(o.config, "config")}}},
      {"config",
       {{"delta_d", cfg.delta_d},
        {"near", {{"alpha", cfg.spatial.near.alpha}, {"beta", cfg.spatial.near.beta}, {"gamma", cfg.spatial.near.gamma}}},
        {"weights", {{"reference", cfg.weights.reference}, {"spatial", cfg.weights.spatial}}},
        {"threshold", cfg.threshold},
        {"promotion", cfg.promotion},
        {"strict", o.strict},
        {"projected", o.projected},
        {"window_expansion", cfg.spatial.window_expansion},
        {"window_min_pad", cfg.spatial.window_min_pad},
        {"circle_segments", cfg.spatial.circle_segments},
        {"frames", frames}}},
      {"outputs", {{"results", o.out}, {"fnv1a64", fnv1a64(results_text)}}},
  };
}

std::string safe_name(std::string_view id) {
  std::string s;
  for (char c : id) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return s;
}

void dump_alrs(const fs::path& dir, const PipelineRun& run, const Gazetteer& gaz) {
  const auto map = output_map(gaz);
  for (const auto& [id, m] : run.matches) {
    json features = json::array();
    json dropped = json::array();
    for (auto i : m.alr.dropped) dropped.push_back(i);
    features.push_back({{"type", "Feature"},
                        {"geometry", region_to_geojson(m.alr.region, map)},
                        {"properties", {{"role", "alr"}, {"low_confidence", m.alr.low_confidence}, {"dropped", dropped}}}});
    for (std::size_t i = 0; i < m.spaces.size(); ++i) {
      const auto& s = m.spaces[i];
      features.push_back({{"type", "Feature"},
                          {"geometry", s.region.empty() ? json(nullptr) : region_to_geojson(s.region, map)},
                          {"properties",
                           {{"role", "search_space"},
                            {"index", i},
                            {"relation", std::string(canonical_label(s.relation))},
                            {"relatum", s.relatum_id},
                            {"constraining", s.constraining}}}});
    }
    json doc = {{"type", "FeatureCollection"}, {"place_id", id}, {"features", features}};
    write_file(dir / (safe_name(id) + ".geojson"), doc.dump(2) + "\n");
  }
}

void dump_kfunction(const fs::path& path, const PipelineRun& run) {
  std::ostringstream csv;
  csv << "distance,k,pairs\n";
  if (run.disambiguation && run.disambiguation->profile) {
    const auto& p = *run.disambiguation->profile;
    csv << std::setprecision(17);
    for (std::size_t i = 0; i < p.size(); ++i) csv << p.distances[i] << ',' << p.values[i] << ',' << p.counts[i] << '\n';
  }
  write_file(path, csv.str());
}

void dump_clusters(const fs::path& path, const PipelineRun& run, const Gazetteer& gaz) {
  const auto map = output_map(gaz);
  const auto out_point = [&](const Point& p) { return map ? map(p) : p; };
  json features = json::array();
  if (run.disambiguation) {
    const auto& d = *run.disambiguation;
    std::vector<json> rank_of(d.points.size(), nullptr);
    for (const auto& c : d.clusters) {
      for (auto i : c.members) rank_of[i] = c.rank;
      const Point lo = out_point(c.context.box.min());
      const Point hi = out_point(c.context.box.max());
      json ring = json::array({json::array({lo.x(), lo.y()}), json::array({hi.x(), lo.y()}),
                               json::array({hi.x(), hi.y()}), json::array({lo.x(), hi.y()}),
                               json::array({lo.x(), lo.y()})});
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                          {"properties", {{"role", "context"}, {"cluster_rank", c.rank}, {"size", c.members.size()}}}});
    }
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      const Point p = out_point(d.points[i].position);
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Point"}, {"coordinates", json::array({p.x(), p.y()})}}},
                          {"properties",
                           {{"role", "entry"},
                            {"place_id", d.points[i].place_id},
                            {"entry_id", d.points[i].entry_id},
                            {"cluster_rank", rank_of[i]}}}});
    }
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  write_file(path, doc.dump(2) + "\n");
}

int cmd_georeference(const RunOptions& o, std::ostream& out, std::ostream& err) {
  auto in = load_inputs(o, err);
  bind_dictionary(in);
  const auto run = georeference(in.graph.graph, in.gazetteer, in.config);
  const auto text = results_to_geojson(run.results, in.gazetteer.projection());
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
    write_file(o.out + ".manifest.json", manifest(o, in, text).dump(2) + "\n");
  }
  if (!o.dump_alr.empty()) dump_alrs(o.dump_alr, run, in.gazetteer);
  if (!o.dump_kfunction.empty()) dump_kfunction(o.dump_kfunction, run);
  if (!o.dump_clusters.empty()) dump_clusters(o.dump_clusters, run, in.gazetteer);

  std::map<Method, std::size_t> counts;
  for (const auto& r : run.results) ++counts[r.method];
  err << "places: " << run.results.size();
  for (const auto& [m, n] : counts) err << ", " << method_name(m) << ' ' << n;
  err << "\n";
  if (run.anchor_count() == 0) {
    err << "error: no anchor place could be geo-referenced\n";
    return kNoAnchors;
  }
  return 0;
}

json ratio_json(const Ratio& r) {
  const auto v = r.value();
  return {{"hits", r.hits}, {"total", r.total}, {"value", v ? json(*v) : json(nullptr)}};
}

std::string csv_value(const Ratio& r) {
  const auto v = r.value();
  if (!v) return "NA";
  std::ostringstream s;
  s << std::setprecision(17) << *v;
  return s.str();
}

int cmd_evaluate(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  const auto results = results_from_geojson(read_file(o.results, "results"));
  AnnotationSet annotations;
  if (!o.annotations.empty()) {
    annotations = load_annotations(read_file(o.annotations, "annotations"));
  } else if (!o.graph.empty()) {
    annotations = annotations_from_graph(load_place_graph(read_file(o.graph, "graph")).graph);
  } else {
    throw ValidationError("evaluate needs --annotations or --graph");
  }
  check_coverage(results, annotations);
  const auto thresholds = parse_thresholds(o.thresholds);

  // Results carry coordinates in the input CRS, so the gazetteer is read without projecting.
  std::optional<Gazetteer> gaz;
  if (!o.gazetteer.empty()) gaz = load_gazetteer(read_file(o.gazetteer, "gazetteer"), GazetteerOptions{true});

  json metrics;
  metrics["precision_anchors"] = ratio_json(precision_anchors(results, annotations));
  metrics["alr_precision"] = {
      {"gazetteered", gaz ? ratio_json(alr_precision(results, annotations, PlaceLabel::gazetteered, &*gaz))
                          : json(nullptr)},
      {"non_gazetteered", ratio_json(alr_precision(results, annotations, PlaceLabel::non_gazetteered, nullptr))}};
  if (!gaz) err << "note: gazetteered ALR precision needs --gazetteer\n";

  const auto curve = precision_by_similarity(results, annotations);
  json jc = json::array();
  std::ostringstream curve_csv;
  curve_csv << "similarity,precision,matches\n";
  for (const auto& p : curve) {
    jc.push_back({{"similarity", p.similarity}, {"precision", ratio_json(p.precision)}});
    curve_csv << p.similarity << ',' << csv_value(p.precision) << ',' << p.precision.total << '\n';
  }
  metrics["precision_by_similarity"] = jc;

  const auto table = recall_tradeoff(results, annotations, thresholds);
  json jt = json::array();
  std::ostringstream trade_csv;
  trade_csv << "threshold,recall_gazetteered,recall_non_gazetteered\n";
  for (const auto& row : table) {
    jt.push_back({{"threshold", row.threshold},
                  {"recall_gazetteered", ratio_json(row.gazetteered)},
                  {"recall_non_gazetteered", ratio_json(row.non_gazetteered)}});
    trade_csv << row.threshold << ',' << csv_value(row.gazetteered) << ',' << csv_value(row.non_gazetteered) << '\n';
  }
  metrics["recall_tradeoff"] = jt;

  const auto text = metrics.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
    fs::path stem = fs::path(o.out).replace_extension();
    write_file(stem.string() + ".precision.csv", curve_csv.str());
    write_file(stem.string() + ".tradeoff.csv", trade_csv.str());
  }
  return 0;
}

int cmd_inspect(const RunOptions& o, const std::string& place, std::ostream& out, std::ostream& err) {
  auto in = load_inputs(o, err);
  bind_dictionary(in);
  if (!in.graph.graph.contains(place)) throw ValidationError("unknown place id '" + place + "'");
  const auto run = georeference(in.graph.graph, in.gazetteer, in.config);
  const auto& r = *std::find_if(run.results.begin(), run.results.end(),
                                [&](const auto& x) { return x.place_id == place; });
  char buf[160];
  out << "place " << place << "\n";
  out << "references:";
  for (const auto& ref : r.references) out << " \"" << ref << "\"";
  out << "\nmethod: " << method_name(r.method) << "\n";
  if (r.entry_id) out << (r.method == Method::alr_only ? "rejected candidate: " : "entry: ") << *r.entry_id << "\n";
  if (r.score) {
    std::snprintf(buf, sizeof buf, "score: %.4f (threshold %.4f)\n", *r.score, r.threshold);
    out << buf;
  }
  if (auto it = run.anchors.find(place); it != run.anchors.end()) {
    out << "lookup hits:";
    for (const auto* e : it->second) out << ' ' << e->id;
    out << "\n";
    if (run.disambiguation) {
      const auto& a = run.disambiguation->assignments.at(place);
      out << "cluster: " << (a.cluster_rank ? "rank " + std::to_string(*a.cluster_rank) : std::string("none"));
      std::snprintf(buf, sizeof buf, ", context area %.1f m2, cluster distance %.1f m\n", a.context.area(),
                    run.disambiguation->cluster_distance_used);
      out << buf;
    }
  }
  if (auto it = run.matches.find(place); it != run.matches.end()) {
    const auto& m = it->second;
    out << "search spaces:\n";
    for (const auto& s : m.spaces) {
      std::snprintf(buf, sizeof buf, "  %-14s %-12s %s area %.1f m2\n", std::string(canonical_label(s.relation)).c_str(),
                    s.relatum_id.c_str(), s.constraining ? "constraining" : "window      ", s.region.area());
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "ALR area: %.1f m2%s\n", m.alr.region.area(), m.alr.low_confidence ? " (low confidence)" : "");
    out << buf;
    out << "candidates: " << m.candidate_count << "\n";
    auto rows = m.table;
    std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) { return a.overall > b.overall; });
    if (!rows.empty()) {
      std::snprintf(buf, sizeof buf, "  %-28s %-24s %9s %9s %9s\n", "reference", "entry", "reference", "spatial", "overall");
      out << buf;
    }
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof buf, "  %-28s %-24s %9.4f %9.4f %9.4f\n", row.reference.c_str(), row.entry_id.c_str(),
                    row.reference_sim, row.spatial_sim, row.overall);
      out << buf;
    }
  }
  out << "provenance:\n";
  for (const auto& p : r.provenance) out << "  - " << p << "\n";
  return 0;
}

// Splices `--config FILE` in as ordinary flags placed before the user's own, so later flags win.
std::vector<std::string> expand_config(std::vector<std::string> args, const std::set<std::string>& subcommands) {
  auto it = std::find_if(args.begin() + 1, args.end(),
                         [](const std::string& a) { return a == "--config" || a.starts_with("--config="); });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (it + 1 == args.end()) throw ValidationError("--config needs a file");
    path = *(it + 1);
  } else {
    path = it->substr(9);
  }
  std::vector<std::string> extra;
  std::istringstream lines(read_file(path, "config"));
  std::size_t line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(text.substr(0, eq)));
    std::string value(trim(text.substr(eq + 1)));
    if (key.starts_with("--")) key.erase(0, 2);
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (value == "true") {
      extra.push_back("--" + key);
    } else if (value != "false") {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  const auto sub = std::find_if(args.begin() + 1, args.end(), [&](const std::string& a) { return subcommands.contains(a); });
  args.insert(sub == args.end() ? args.end() : sub + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geo-reference the places of a place graph against a gazetteer", "georef"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(GEOREF_VERSION));

  RunOptions geo;
  auto* georef_cmd = app.add_subcommand("georeference", "Run the pipeline and write result GeoJSON");
  add_run_options(georef_cmd, geo);
  georef_cmd->add_option("--out", geo.out, "Result GeoJSON (stdout when omitted); a manifest is written beside it");
  georef_cmd->add_option("--dump-alr", geo.dump_alr, "Directory for per-place ALR and search-space GeoJSON");
  georef_cmd->add_option("--dump-kfunction", geo.dump_kfunction, "CSV of the K-function profile");
  georef_cmd->add_option("--dump-clusters", geo.dump_clusters, "GeoJSON of clustered anchor entries");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score results against annotations");
  eval_cmd->add_option("--results", ev.results, "Result GeoJSON from georeference")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--annotations", ev.annotations, "Annotation JSON")->check(CLI::ExistingFile);
  eval_cmd->add_option("--graph", ev.graph, "Graph with embedded annotations (when --annotations is absent)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--gazetteer", ev.gazetteer, "Gazetteer, for ALR precision of gazetteered places")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--thresholds", ev.thresholds, "Trade-off thresholds first:last:step")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Metrics JSON (stdout when omitted); CSV curves are written beside it");

  RunOptions ins;
  std::string place;
  auto* inspect_cmd = app.add_subcommand("inspect", "Explain how one place was geo-referenced");
  add_run_options(inspect_cmd, ins);
  inspect_cmd->add_option("--place", place, "Place id")->required();

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args), {"georeference", "evaluate", "inspect"});
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  std::vector<const char*> expanded;
  for (const auto& a : args) expanded.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kBadInput;
  }

  try {
    if (*georef_cmd) return cmd_georeference(geo, out, err);
    if (*eval_cmd) return cmd_evaluate(ev, out, err);
    return cmd_inspect(ins, place, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const UnknownRelation& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace georef::cli
