#include "config.hpp"

#include "cahnlab/barycenter.hpp"
#include "cahnlab/critical.hpp"
#include "cahnlab/energy.hpp"
#include "cahnlab/error.hpp"
#include "cahnlab/multiplicity.hpp"
#include "cahnlab/photography.hpp"
#include "cahnlab/profile.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cahnlab;
using cahnlab::cli::Config;
using cahnlab::cli::ConfigError;

namespace {

struct Session {
  std::string mode;
  Config cfg = Config::defaults();
  fs::path out = ".";
  int threads = 1;
  std::string seed_list;

  json header() const {
    json config = json::object();
    for (const auto& [k, e] : cfg.entries()) config[k] = e.value;
    return {{"type", "config"}, {"mode", mode}, {"threads", threads}, {"config", config}};
  }

  /// JSON-lines artifact; the first record is the config header.
  std::ofstream open_jsonl(const std::string& name) const {
    std::ofstream f(out / name);
    if (!f) throw Rejection("cannot write " + (out / name).string());
    json h = header();
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    h["timestamp"] = ts.str();
    f << h.dump() << '\n';
    return f;
  }

  /// CSV artifact; the config is written as leading '#' lines.
  std::ofstream open_csv(const std::string& name) const {
    std::ofstream f(out / name);
    if (!f) throw Rejection("cannot write " + (out / name).string());
    f << "# mode = " << mode << '\n';
    for (const auto& line : cli::header_lines(cfg)) f << "# " << line << '\n';
    f.precision(12);
    return f;
  }
};

std::optional<double> optional_number(const Config& cfg, const std::string& key) {
  if (cfg.raw(key).empty()) return std::nullopt;
  return cfg.number(key);
}

SurfaceMesh build_mesh(const Config& cfg) {
  const std::string family = cfg.raw("mesh.family");
  const std::string path = cfg.raw("mesh.path");
  if (!path.empty()) {
    if (!fs::exists(path)) throw ConfigError(cfg.origin("mesh.path") + ": mesh file '" + path + "' does not exist");
    const MeshFamily fam = family == "icosphere" ? MeshFamily::sphere : mesh_family_from_string(family);
    return load_mesh(path, fam, optional_number(cfg, "mesh.inj_estimate"));
  }
  MeshSpec spec;
  spec.family = family;
  spec.subdivisions = cfg.integer("mesh.subdivisions");
  const auto axes = cfg.numbers("mesh.axes");
  if (axes.size() != 3) throw ConfigError(cfg.origin("mesh.axes") + ": mesh.axes needs three values");
  spec.axes = {axes[0], axes[1], axes[2]};
  spec.major_radius = cfg.number("mesh.major_radius");
  spec.minor_radius = cfg.number("mesh.minor_radius");
  spec.nu = cfg.integer("mesh.nu");
  spec.nv = cfg.integer("mesh.nv");
  auto mesh = generate_mesh(spec);
  if (auto inj = optional_number(cfg, "mesh.inj_estimate")) {
    return SurfaceMesh(mesh.positions(), mesh.triangles(), mesh.family(), inj);
  }
  return mesh;
}

std::string mesh_id(const Config& cfg) {
  if (!cfg.raw("mesh.path").empty()) return cfg.raw("mesh.path");
  const std::string f = cfg.raw("mesh.family");
  if (f == "torus") {
    return "torus(" + cfg.raw("mesh.major_radius") + "," + cfg.raw("mesh.minor_radius") + "," + cfg.raw("mesh.nu") +
           "," + cfg.raw("mesh.nv") + ")";
  }
  if (f == "ellipsoid") return "ellipsoid(" + cfg.raw("mesh.axes") + "," + cfg.raw("mesh.subdivisions") + ")";
  return f + "(" + cfg.raw("mesh.subdivisions") + ")";
}

DoubleWell build_potential(const Config& cfg) {
  const std::string kind = cfg.raw("potential.kind");
  if (kind == "quartic") return DoubleWell::quartic();
  if (kind == "polynomial") {
    const auto c = cfg.numbers("potential.coefficients");
    const auto g = cfg.numbers("potential.growth");
    const auto t = cfg.numbers("potential.tail");
    if (c.empty()) throw ConfigError(cfg.origin("potential.coefficients") + ": polynomial needs coefficients");
    if (g.size() != 3) throw ConfigError(cfg.origin("potential.growth") + ": growth needs A,B,p");
    if (t.size() != 5) throw ConfigError(cfg.origin("potential.tail") + ": tail needs c1,c2,p1,p2,t0");
    DoubleWell w(Polynomial(c), GrowthBound{g[0], g[1], g[2]}, TailBound{t[0], t[1], t[2], t[3], t[4]},
                 cfg.number("potential.delta"), "polynomial");
    const auto report = check_assumptions(w);
    if (!report.all()) {
      std::string msg = "potential violates the double-well assumptions:";
      for (const auto& f : report.failures) msg += " " + f + ";";
      throw Rejection(msg);
    }
    return w;
  }
  throw ConfigError(cfg.origin("potential.kind") + ": unknown potential kind '" + kind + "'");
}

std::vector<double> positive_list(const Config& cfg, const std::string& key) {
  auto v = cfg.numbers(key);
  if (v.empty()) throw ConfigError(cfg.origin(key) + ": " + key + " must not be empty");
  for (double x : v) {
    if (!(x > 0.0)) throw ConfigError(cfg.origin(key) + ": " + key + " values must be positive");
  }
  return v;
}

DistanceMethod distance_method(const Config& cfg) {
  const std::string m = cfg.raw("distance.method");
  if (m == "fast_marching") return DistanceMethod::fast_marching;
  if (m == "graph") return DistanceMethod::graph;
  throw ConfigError(cfg.origin("distance.method") + ": expected fast_marching or graph");
}

PhotographOptions photograph_options(const Config& cfg) {
  PhotographOptions o;
  o.profile_samples = cfg.integer("profile.samples");
  o.offset_exponent = cfg.number("profile.offset_exponent");
  o.distance = distance_method(cfg);
  return o;
}

FlowConfig flow_config(const Config& cfg) {
  FlowConfig f;
  f.tau0 = cfg.number("flow.tau0");
  f.tau_max = cfg.number("flow.tau_max");
  f.max_steps = cfg.integer("flow.max_steps");
  f.tol_grad = cfg.number("flow.tol_grad");
  f.backtrack = cfg.number("flow.backtrack");
  f.grow = cfg.number("flow.grow");
  f.grow_after = cfg.integer("flow.grow_after");
  f.cg_tolerance = cfg.number("flow.cg_tolerance");
  f.newton = cfg.boolean("flow.newton");
  f.trajectory_every = cfg.integer("flow.trajectory_every");
  return f;
}

std::vector<int> read_seed_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open seed list");
  std::vector<int> out;
  std::string tok;
  int line = 0;
  std::string text;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.erase(hash);
    for (char& ch : text) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(text);
    while (ls >> tok) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ConfigError(path + ":" + std::to_string(line) + ": not a vertex index '" + tok + "'");
      out.push_back(v);
    }
  }
  return out;
}

std::vector<int> base_points(const Session& s, const SurfaceMesh& mesh) {
  const Config& cfg = s.cfg;
  SeedSpec spec;
  if (!s.seed_list.empty()) {
    spec.kind = SeedSpec::Kind::explicit_list;
    spec.vertices = read_seed_list(s.seed_list);
  } else {
    const std::string kind = cfg.raw("seeds.kind");
    spec.count = cfg.integer("seeds.count");
    if (kind == "farthest_point") {
      spec.kind = SeedSpec::Kind::farthest_point;
    } else if (kind == "subsample") {
      spec.kind = SeedSpec::Kind::subsample;
    } else if (kind == "list") {
      spec.kind = SeedSpec::Kind::explicit_list;
      spec.vertices = cfg.integers("seeds.list");
    } else {
      throw ConfigError(cfg.origin("seeds.kind") + ": expected farthest_point, subsample or list");
    }
  }
  return seed_vertices(mesh, spec, distance_method(cfg));
}

json run_record(const CriticalPoint& cp) {
  json r = {{"type", "run"},
            {"epsilon", cp.epsilon},
            {"V", cp.volume},
            {"energy", cp.energy},
            {"lambda", cp.lambda},
            {"grad_norm", cp.grad_norm},
            {"ps_norm", cp.ps_norm},
            {"steps", cp.steps},
            {"converged", cp.converged},
            {"max_volume_drift", cp.max_volume_drift}};
  r["base_point"] = cp.base_point ? json(*cp.base_point) : json(nullptr);
  r["morse_index"] = cp.morse_index ? json(*cp.morse_index) : json(nullptr);
  return r;
}

// ---- modes -----------------------------------------------------------------

int mode_profile(const Session& s) {
  const Config& cfg = s.cfg;
  const auto w = build_potential(cfg);
  const double alpha = cfg.number("profile.alpha"), beta = cfg.number("profile.beta");
  const int n = cfg.integer("profile.samples");
  const double k = cfg.number("profile.offset_exponent");
  auto jsonl = s.open_jsonl("profile.jsonl");
  auto summary = s.open_csv("profile_summary.csv");
  summary << "epsilon,samples,eta,eta_bound,max_residual,max_spacing\n";
  for (double eps : positive_list(cfg, "epsilon")) {
    const auto table = build_profile(w, eps, alpha, beta, n, k);
    const auto res = profile_residual(table, w);
    const double bound = std::pow(eps, 0.25) * (beta - alpha);
    std::ostringstream name;
    name << "profile_eps_" << eps << ".csv";
    auto csv = s.open_csv(name.str());
    write_profile_csv(csv, table);
    summary << eps << ',' << n << ',' << table.eta() << ',' << bound << ',' << res.max_residual << ','
            << res.spacing << '\n';
    jsonl << json{{"type", "profile"},     {"epsilon", eps},       {"samples", n},
                  {"eta", table.eta()},    {"eta_bound", bound},   {"max_residual", res.max_residual},
                  {"spacing", res.spacing}}
                 .dump()
          << '\n';
    std::cout << "epsilon " << eps << ": eta " << table.eta() << " (bound " << bound << "), residual "
              << res.max_residual << '\n';
  }
  return 0;
}

int mode_photograph(const Session& s) {
  const Config& cfg = s.cfg;
  const auto mesh = build_mesh(cfg);
  const auto w = build_potential(cfg);
  const auto opts = photograph_options(cfg);
  const auto points = cfg.integers("photograph.base_points");
  auto jsonl = s.open_jsonl("photograph.jsonl");
  auto summary = s.open_csv("photograph.csv");
  summary << "base_point,epsilon,V,radius,delta,energy,level,inside\n";
  for (double eps : positive_list(cfg, "epsilon")) {
    const auto profile = photography_profile(w, eps, opts);
    for (double vol : positive_list(cfg, "volume")) {
      std::vector<ModicaField> fields;
      for (int x0 : points) {
        fields.push_back(photograph(mesh, w, eps, vol, x0, profile, opts));
        const auto& f = fields.back();
        std::ostringstream name;
        name << "field_b" << x0 << "_eps_" << eps << "_V_" << vol << ".csv";
        auto csv = s.open_csv(name.str());
        csv << "vertex,x,y,z,u,distance\n";
        for (int i = 0; i < mesh.num_vertices(); ++i) {
          const auto& p = mesh.position(i);
          csv << i << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << f.field[i] << ',' << f.distance[i]
              << '\n';
        }
      }
      const auto report = sublevel_check(w, vol, fields, cfg.number("photograph.margin"));
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        summary << f.base_point << ',' << eps << ',' << vol << ',' << f.radius << ',' << f.delta << ',' << f.energy
                << ',' << report.level << ',' << report.entries[i].inside << '\n';
        jsonl << json{{"type", "photograph"}, {"base_point", f.base_point}, {"epsilon", eps},
                      {"V", vol},             {"radius", f.radius},         {"delta", f.delta},
                      {"energy", f.energy},   {"level", report.level},      {"inside", report.entries[i].inside},
                      {"volume_error", std::abs(mesh.integrate(f.field) - vol)}}
                     .dump()
              << '\n';
      }
      std::cout << "epsilon " << eps << ", V " << vol << ": max energy " << report.max_energy << " vs level "
                << report.level << (report.all_inside ? " (inside)" : " (OUTSIDE)") << '\n';
    }
  }
  return 0;
}

int mode_flow(const Session& s) {
  const Config& cfg = s.cfg;
  const auto mesh = build_mesh(cfg);
  const auto w = build_potential(cfg);
  const double eps = positive_list(cfg, "epsilon").front();
  const double vol = positive_list(cfg, "volume").front();
  const auto fc = flow_config(cfg);
  const std::string init = cfg.raw("flow.init");
  ScalarField u0;
  std::optional<int> bp;
  if (init == "photograph") {
    bp = cfg.integer("flow.base_point");
    u0 = photograph(mesh, w, eps, vol, *bp, photograph_options(cfg)).field;
  } else if (init == "constant") {
    u0 = ScalarField::Constant(mesh.num_vertices(), vol / mesh.total_area());
  } else {
    throw ConfigError(cfg.origin("flow.init") + ": expected photograph or constant");
  }

  std::unique_ptr<Potential> truncated;
  const Potential* pot = &w;
  if (cfg.boolean("flow.truncate")) {
    truncated = std::make_unique<TruncatedPotential>(
        truncate(w, eps, cfg.number("truncation.lambda_star"), cfg.number("truncation.t1")));
    pot = truncated.get();
  }
  auto cp = solve_constrained(mesh, *pot, eps, vol, u0, fc);
  cp.base_point = bp;
  const int k = std::min(cfg.integer("morse.k"), mesh.num_vertices() - 2);
  json extra = json::object();
  if (k > 0) {
    const auto morse = morse_index(mesh, *pot, eps, cp.u, k);
    cp.morse_index = morse.index;
    cp.nondegenerate = morse.nondegenerate;
    extra = {{"morse_tolerance", morse.tolerance},
             {"nondegenerate", morse.nondegenerate},
             {"morse_saturated", morse.saturated},
             {"eigenvalues", morse.eigenvalues}};
  }
  auto jsonl = s.open_jsonl("flow.jsonl");
  json rec = run_record(cp);
  rec.update(extra);
  rec["potential"] = pot->id();
  rec["mesh"] = mesh_id(cfg);
  rec["tol_grad"] = fc.tol_grad > 0.0 ? fc.tol_grad : default_tol_grad(mesh);
  if (truncated) {
    const auto& t = static_cast<const TruncatedPotential&>(*truncated);
    rec["s_minus"] = t.s_minus();
    rec["s_plus"] = t.s_plus();
    rec["u_min"] = cp.u.minCoeff();
    rec["u_max"] = cp.u.maxCoeff();
  }
  jsonl << rec.dump() << '\n';
  {
    auto csv = s.open_csv("flow_field.csv");
    csv << "vertex,x,y,z,u0,u\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      const auto& p = mesh.position(i);
      csv << i << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << u0[i] << ',' << cp.u[i] << '\n';
    }
  }
  if (!cp.trajectory.empty()) {
    auto csv = s.open_csv("flow_trajectory.csv");
    csv << "step,energy,grad_norm,lambda\n";
    for (const auto& t : cp.trajectory) csv << t.step << ',' << t.energy << ',' << t.grad_norm << ',' << t.lambda << '\n';
  }
  std::cout << (cp.converged ? "converged" : "NOT converged") << " after " << cp.steps << " steps: energy "
            << cp.energy << ", lambda " << cp.lambda << ", grad " << cp.grad_norm;
  if (cp.morse_index) std::cout << ", Morse index " << *cp.morse_index;
  std::cout << '\n';
  return cp.converged ? 0 : 3;
}

TopologyCard card_for(const Config& cfg, const SurfaceMesh& mesh) {
  std::optional<int> genus;
  if (!cfg.raw("mesh.genus").empty()) genus = cfg.integer("mesh.genus");
  if (genus) return topology_card_genus(*genus);
  return topology_card(mesh.family());
}

int mode_sweep(const Session& s) {
  const Config& cfg = s.cfg;
  const auto mesh = build_mesh(cfg);
  const auto w = build_potential(cfg);
  const auto card = card_for(cfg, mesh);
  const auto seeds = base_points(s, mesh);
  SweepConfig sc;
  sc.flow = flow_config(cfg);
  sc.photograph = photograph_options(cfg);
  sc.dedupe = {cfg.number("sweep.relative_l2"), cfg.number("sweep.relative_energy")};
  sc.delta_margin = cfg.number("sweep.delta_margin");
  sc.morse_k = cfg.integer("morse.k");
  sc.threads = s.threads;

  auto jsonl = s.open_jsonl("sweep.jsonl");
  auto classes_csv = s.open_csv("sweep_classes.csv");
  auto summary = s.open_csv("sweep_summary.csv");
  summary << "epsilon,V,level_c,runs,converged,distinct_total,distinct_below_c,constant_classes,cat,cat_plus_1,p1,"
             "required_2p1_minus_1,morse_count,q1,reading,passed,unreliable\n";
  bool header_written = false;
  for (double eps : positive_list(cfg, "epsilon")) {
    for (double vol : positive_list(cfg, "volume")) {
      const auto result = sweep(mesh, w, eps, vol, seeds, sc, card, mesh_id(cfg));
      const auto report = morse_report(result);
      for (const auto& run : result.runs) {
        json rec;
        if (run.point) {
          rec = run_record(*run.point);
        } else {
          rec = {{"type", "run"}, {"epsilon", eps}, {"V", vol}, {"converged", false}, {"error", run.error}};
          rec["base_point"] = run.base_point ? json(*run.base_point) : json(nullptr);
        }
        rec["seed_index"] = run.seed_index;
        jsonl << rec.dump() << '\n';
      }
      for (std::size_t i = 0; i < result.classes.size(); ++i) {
        const auto& c = result.classes[i];
        json rec = {{"type", "class"}, {"epsilon", eps}, {"V", vol}, {"class", i},
                    {"energy", c.representative.energy}, {"lambda", c.representative.lambda},
                    {"size", c.size}, {"constant", c.constant}, {"below_c", c.below_c},
                    {"barycenter_vertex", c.barycenter_vertex}, {"members", c.members}};
        rec["morse_index"] = c.morse_index ? json(*c.morse_index) : json(nullptr);
        rec["nondegenerate"] = c.nondegenerate ? json(*c.nondegenerate) : json(nullptr);
        rec["concentration"] = c.concentration ? json(*c.concentration) : json(nullptr);
        jsonl << rec.dump() << '\n';
      }
      const auto& n = result.counts;
      json rep = {{"type", "morse_report"}, {"epsilon", eps}, {"V", vol}, {"level_c", result.level_c},
                  {"distinct_total", n.distinct_total}, {"distinct_below_c", n.distinct_below_c},
                  {"cat", n.predicted_cat}, {"p1", n.predicted_p1}, {"count", report.count},
                  {"required", report.required}, {"q1", report.q1}, {"reading", report.reading},
                  {"converged_runs", result.converged_runs}, {"unreliable", result.unreliable}};
      rep["passed"] = report.passed ? json(*report.passed) : json(nullptr);
      jsonl << rep.dump() << '\n';

      std::ostringstream table;
      write_sweep_csv(table, result);
      std::istringstream lines(table.str());
      std::string line;
      std::getline(lines, line);
      if (!header_written) {
        classes_csv << "epsilon,V," << line << '\n';
        header_written = true;
      }
      while (std::getline(lines, line)) classes_csv << eps << ',' << vol << ',' << line << '\n';

      summary << eps << ',' << vol << ',' << result.level_c << ',' << result.runs.size() << ','
              << result.converged_runs << ',' << n.distinct_total << ',' << n.distinct_below_c << ','
              << n.constant_classes << ',' << n.predicted_cat << ',' << n.predicted_cat_plus_1 << ','
              << n.predicted_p1 << ',' << n.predicted_2p1_minus_1 << ',' << report.count << ',' << report.q1 << ','
              << report.reading << ',' << (report.passed ? (*report.passed ? "1" : "0") : "") << ','
              << result.unreliable << '\n';
      std::cout << "epsilon " << eps << ", V " << vol << ": " << n.distinct_total << " classes, "
                << n.distinct_below_c << " below c = " << result.level_c << " (cat " << n.predicted_cat
                << "); Morse count " << report.count << " vs 2P1-1 = " << report.required << " ["
                << report.reading << (report.passed ? (*report.passed ? ", pass" : ", fail") : "") << "]"
                << (result.unreliable ? " UNRELIABLE" : "") << '\n';
    }
  }
  return 0;
}

int mode_gamma(const Session& s) {
  const Config& cfg = s.cfg;
  const auto mesh = build_mesh(cfg);
  const auto w = build_potential(cfg);
  const auto opts = photograph_options(cfg);
  const double vol = positive_list(cfg, "volume").front();
  const int x0 = cfg.integers("photograph.base_points").at(0);
  const double sig = sigma(w, 0.0, 1.0);
  const auto dist = geodesic_distance(mesh, x0, opts.distance);
  const double r = ball_radius_for_volume(mesh, dist, vol).radius;
  const double perimeter = ball_perimeter(mesh, dist, r);
  auto jsonl = s.open_jsonl("gamma.jsonl");
  auto csv = s.open_csv("gamma.csv");
  csv << "# sigma = " << sig << ", perimeter = " << perimeter << ", radius = " << r << '\n';
  csv << "epsilon,energy,sigma_perimeter,overshoot,l1_to_ball\n";
  for (double eps : positive_list(cfg, "epsilon")) {
    const auto f = photograph(mesh, w, eps, vol, x0, opts);
    const double target = sig * perimeter;
    const double l1 = ball_l1_distance(mesh, f);
    csv << eps << ',' << f.energy << ',' << target << ',' << f.energy / target - 1.0 << ',' << l1 << '\n';
    jsonl << json{{"type", "gamma"},          {"base_point", x0}, {"epsilon", eps},
                  {"V", vol},                 {"energy", f.energy}, {"sigma_perimeter", target},
                  {"overshoot", f.energy / target - 1.0}, {"l1_to_ball", l1}}
                 .dump()
          << '\n';
    std::cout << "epsilon " << eps << ": energy " << f.energy << " vs " << target << ", L1 " << l1 << '\n';
  }
  return 0;
}

int mode_audit_barycenter(const Session& s) {
  const Config& cfg = s.cfg;
  const auto mesh = build_mesh(cfg);
  const auto w = build_potential(cfg);
  const double eps = positive_list(cfg, "epsilon").front();
  const double vol = positive_list(cfg, "volume").front();
  std::vector<int> points;
  if (!s.seed_list.empty()) {
    points = base_points(s, mesh);
  } else {
    SeedSpec spec;
    spec.count = cfg.integer("audit.base_points");
    points = seed_vertices(mesh, spec, distance_method(cfg));
  }
  const auto report = homotopy_audit(mesh, w, eps, vol, points, photograph_options(cfg));
  auto jsonl = s.open_jsonl("audit_barycenter.jsonl");
  auto csv = s.open_csv("audit_barycenter.csv");
  csv << "base_point,distance,tube_distance,ambiguous\n";
  for (const auto& e : report.entries) {
    csv << e.base_point << ',' << e.distance << ',' << e.tube_distance << ',' << e.ambiguous << '\n';
    jsonl << json{{"type", "homotopy"},         {"base_point", e.base_point}, {"epsilon", eps}, {"V", vol},
                  {"distance", e.distance},     {"tube_distance", e.tube_distance}, {"ambiguous", e.ambiguous}}
                 .dump()
          << '\n';
  }
  json rec = {{"type", "homotopy_report"}, {"max_distance", report.max_distance},
              {"mean_distance", report.mean_distance}};
  rec["inj_estimate"] = report.inj_estimate ? json(*report.inj_estimate) : json(nullptr);
  rec["passed"] = report.passed ? json(*report.passed) : json(nullptr);
  jsonl << rec.dump() << '\n';
  std::cout << "max distance " << report.max_distance;
  if (report.inj_estimate) std::cout << " vs inj " << *report.inj_estimate;
  std::cout << (report.passed ? (*report.passed ? " (pass)" : " (FAIL)") : " (no injectivity estimate)") << '\n';
  return report.passed.value_or(true) ? 0 : 4;
}

int mode_audit_multiplier(const Session& s) {
  const Config& cfg = s.cfg;
  const auto mesh = build_mesh(cfg);
  const auto w = build_potential(cfg);
  const double vol = positive_list(cfg, "volume").front();
  const int x0 = cfg.integer("flow.base_point");
  const auto fc = flow_config(cfg);
  const auto opts = photograph_options(cfg);
  std::vector<CriticalPoint> concentrated, constant;
  auto jsonl = s.open_jsonl("audit_multiplier.jsonl");
  auto csv = s.open_csv("audit_multiplier.csv");
  csv << "family,epsilon,energy,lambda,ratio,converged\n";
  for (double eps : positive_list(cfg, "epsilon")) {
    auto a = solve_constrained(mesh, w, eps, vol, photograph(mesh, w, eps, vol, x0, opts).field, fc);
    a.base_point = x0;
    auto b = solve_constrained(mesh, w, eps, vol, ScalarField::Constant(mesh.num_vertices(), vol / mesh.total_area()),
                               fc);
    for (auto* cp : {&a, &b}) {
      const bool conc = cp == &a;
      json rec = run_record(*cp);
      rec["family"] = conc ? "concentrated" : "constant";
      jsonl << rec.dump() << '\n';
      csv << (conc ? "concentrated" : "constant") << ',' << eps << ',' << cp->energy << ',' << cp->lambda << ','
          << std::abs(cp->lambda) / cp->energy << ',' << cp->converged << '\n';
    }
    concentrated.push_back(std::move(a));
    constant.push_back(std::move(b));
  }
  int status = 0;
  for (const auto& [name, runs] : {std::pair{"concentrated", &concentrated}, std::pair{"constant", &constant}}) {
    const auto audit = multiplier_audit(*runs);
    jsonl << json{{"type", "multiplier_audit"}, {"family", name},
                  {"min_ratio", audit.min_ratio}, {"max_ratio", audit.max_ratio},
                  {"variation", audit.variation}, {"flagged", audit.flagged}}
                 .dump()
          << '\n';
    std::cout << name << ": |lambda|/E in [" << audit.min_ratio << ", " << audit.max_ratio << "], variation "
              << audit.variation << (audit.flagged ? " FLAGGED" : "") << '\n';
    if (audit.flagged) status = 4;
  }
  return status;
}

int mode_report(const Session& s) {
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(s.out)) {
    if (entry.path().extension() == ".jsonl") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  auto csv = s.open_csv("summary.csv");
  const char* columns[] = {"base_point", "epsilon", "V",      "energy",     "lambda",
                           "grad_norm",  "ps_norm", "steps",  "morse_index", "converged"};
  csv << "source,mode";
  for (const char* c : columns) csv << ',' << c;
  csv << '\n';
  int rows = 0;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    std::string line, mode;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::exception& e) {
        throw Rejection(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      const std::string type = rec.value("type", "");
      if (type == "config") mode = rec.value("mode", "");
      if (type != "run") continue;
      csv << path.filename().string() << ',' << mode;
      for (const char* c : columns) {
        csv << ',';
        if (rec.contains(c) && !rec[c].is_null()) {
          const auto& v = rec[c];
          if (v.is_boolean()) {
            csv << (v.get<bool>() ? 1 : 0);
          } else if (v.is_number_float()) {
            csv << v.get<double>();
          } else {
            csv << v.dump();
          }
        }
      }
      csv << '\n';
      ++rows;
    }
  }
  std::cout << rows << " run records from " << inputs.size() << " files\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the volume-constrained Cahn-Hilliard problem on surfaces"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  Session s;
  std::string config_path, mesh_path;
  std::string out_dir = ".";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_path, "configuration file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed-list", s.seed_list, "file of base-point vertex indices")->check(CLI::ExistingFile);
  app.add_option("--mesh", mesh_path, "OFF/OBJ mesh, overrides mesh.path")->check(CLI::ExistingFile);

  const std::pair<const char*, int (*)(const Session&)> modes[] = {
      {"profile", mode_profile},
      {"photograph", mode_photograph},
      {"flow", mode_flow},
      {"sweep", mode_sweep},
      {"gamma", mode_gamma},
      {"audit-barycenter", mode_audit_barycenter},
      {"audit-multiplier", mode_audit_multiplier},
      {"report", mode_report},
  };
  const char* help[] = {"1-D profile tables and residuals",
                        "photograph fields and sublevel check",
                        "single constrained flow run",
                        "multi-seed sweep, classes and Morse report",
                        "photograph energy against sigma times perimeter across epsilon",
                        "barycenter homotopy audit",
                        "Lagrange multiplier audit across epsilon",
                        "aggregate JSON-lines records into CSV"};
  for (std::size_t i = 0; i < std::size(modes); ++i) app.add_subcommand(modes[i].first, help[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  s.mode = app.get_subcommands().front()->get_name();
  s.threads = threads;
  s.out = out_dir;
  try {
    if (!config_path.empty()) s.cfg.load_file(config_path);
    s.cfg.apply_environment();
    if (!mesh_path.empty()) s.cfg.set("mesh.path", mesh_path, "flag");
    fs::create_directories(s.out);
    const fs::path probe = s.out / ".write_test";
    if (!std::ofstream(probe)) throw ConfigError(s.out.string() + ": output directory is not writable");
    fs::remove(probe);
    fs::remove(s.out / "FAILED");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    for (const auto& [name, fn] : modes) {
      if (s.mode == name) return fn(s);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::ofstream marker(s.out / "FAILED");
    marker << "mode = " << s.mode << '\n' << e.what() << '\n';
    std::cerr << "rejected: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
