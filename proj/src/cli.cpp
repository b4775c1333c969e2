#include "harmtree/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "harmtree/carleson.hpp"
#include "harmtree/error.hpp"
#include "harmtree/harmonic.hpp"
#include "harmtree/instance.hpp"
#include "harmtree/kernel_bmo.hpp"
#include "harmtree/norms.hpp"
#include "harmtree/random.hpp"
#include "harmtree/sampling.hpp"

namespace harmtree {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json rng_section(std::optional<std::uint64_t> seed) {
  return {{"algorithm", std::string(Rng::kAlgorithm)}, {"seed", seed ? json(*seed) : json(nullptr)}};
}

json vertex_ref(const Tree& t, VertexId v) {
  if (v == kNoVertex) return nullptr;
  return {{"vertex", v}, {"level", t.level(v)}};
}

std::vector<Exponent> parse_exponents(const std::string& list) {
  std::vector<Exponent> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(Exponent::parse(item));
  }
  if (out.empty()) throw UsageError("empty exponent list");
  return out;
}

std::string fmt(double v) { return json(v).dump(); }

/// Per-vertex table: vertex, level, parent, m, then the given columns.
void write_csv(const std::string& path, const Tree& t, const FlowMeasure& m,
               const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << "vertex,level,parent,m";
  for (const auto& c : columns) out << ',' << c.first;
  out << '\n';
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    const auto p = t.parent(x);
    out << x << ',' << t.level(x) << ',' << (p ? std::to_string(*p) : std::string()) << ',' << fmt(m[x]);
    for (const auto& c : columns) out << ',' << fmt(c.second[x]);
    out << '\n';
  }
}

VertexMeasure resolve_sigma(const Instance& inst, bool sigma_flow) {
  if (inst.sigma) return *inst.sigma;
  if (sigma_flow) {
    const FlowMeasure m = inst.flow();
    return VertexMeasure(std::vector<double>(m.weights().begin(), m.weights().end()));
  }
  throw UsageError("instance has no sigma; pass --sigma-flow to use sigma = m");
}

/// The named function, or `trials` seeded random real functions.
std::vector<std::pair<std::string, BoundaryFunction>> resolve_b(const Instance& inst, const std::string& name,
                                                                std::size_t trials, std::uint64_t seed) {
  std::vector<std::pair<std::string, BoundaryFunction>> out;
  if (!name.empty()) {
    out.emplace_back(name, inst.boundary_function(name));
    return out;
  }
  Rng rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    out.emplace_back("random:" + std::to_string(k), sample_real_function(rng, inst.tree, k));
  }
  return out;
}

json audit_json(const Tree& t, const KernelAudit& a) {
  return {{"alpha", a.alpha},
          {"cancellation_max", a.cancellation_max},
          {"cancellation_scale", a.cancellation_scale},
          {"cancellation_ok", a.cancellation_ok},
          {"cancellation_vertex", vertex_ref(t, a.cancellation_vertex)},
          {"ck", a.ck},
          {"ck_leaf", t.leaves()[a.ck_leaf]},
          {"decay_ok", a.a3_ok},
          {"decay_worst_ratio", a.a3_worst_ratio},
          {"decay_vertex", vertex_ref(t, a.a3_vertex)},
          {"decay_leaf", a.a3_vertex == kNoVertex ? json(nullptr) : json(t.leaves()[a.a3_leaf])}};
}

struct Common {
  std::string instance;
  std::string csv;
};

int emit(std::ostream& out, json report, bool pass) {
  report["verdict"] = pass ? "PASS" : "FAIL";
  out << report.dump(2) << '\n';
  return pass ? kExitPass : kExitFail;
}

json header(const std::string& command, const std::string& instance, std::optional<std::uint64_t> seed) {
  json r = json::object();
  r["command"] = command;
  if (!instance.empty()) r["instance"] = instance;
  r["verdict"] = nullptr;
  r["constants"] = json::object();
  r["witnesses"] = json::object();
  r["rng"] = rng_section(seed);
  return r;
}

// ---------------------------------------------------------------- commands

struct GenOpts {
  int depth = 3;
  std::vector<int> branching{2, 2};
  std::string nu_law = "uniform";
  std::vector<double> nu_range{0.1, 10.0};
  std::uint64_t seed = 0;
  std::string sigma = "none";
  std::string output;
};

int cmd_gen(const GenOpts& o, std::ostream& out) {
  GenSpec spec;
  spec.depth = o.depth;
  spec.branch_lo = o.branching.front();
  spec.branch_hi = o.branching.back();
  spec.nu_law = o.nu_law == "uniform" ? GenSpec::NuLaw::Uniform : GenSpec::NuLaw::LogUniform;
  spec.nu_lo = o.nu_range.front();
  spec.nu_hi = o.nu_range.back();
  spec.seed = o.seed;
  Instance inst = generate(spec);
  if (o.sigma != "none") {
    Rng rng(o.seed ^ 0x5bd1e995ULL);
    const SigmaLaw law = o.sigma == "flow" ? SigmaLaw::Flow : o.sigma == "random" ? SigmaLaw::Random : SigmaLaw::Spike;
    const VertexMeasure s = sample_vertex_measure(rng, inst.tree, inst.flow(), law);
    inst.sigma = s;
    inst.meta["sigma"] = o.sigma;
  }
  if (o.output.empty()) {
    out << serialize_instance(inst);
    return kExitPass;
  }
  save_instance(inst, o.output);
  json r = header("gen", o.output, o.seed);
  r["constants"] = {{"vertices", inst.tree.vertex_count()},
                    {"leaves", inst.tree.leaf_count()},
                    {"height", inst.tree.height()}};
  return emit(out, std::move(r), true);
}

int cmd_check(const Common& c, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const FlowMeasure m = inst.flow();
  json r = header("check", c.instance, std::nullopt);
  const FlowCheck fc = check_flow(t, m);
  bool pass = fc.ok;
  std::size_t min_branching = 0;
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    const std::size_t k = t.children(x).size();
    if (k > 0 && (min_branching == 0 || k < min_branching)) min_branching = k;
  }
  r["constants"] = {{"vertices", t.vertex_count()},
                    {"leaves", t.leaf_count()},
                    {"height", t.height()},
                    {"min_branching", min_branching},
                    {"max_branching", t.max_branching()},
                    {"flow_ok", fc.ok},
                    {"flow_worst_violation", fc.worst_violation},
                    {"has_sigma", inst.sigma.has_value()},
                    {"has_kernel", inst.kernel.has_value()},
                    {"functions", inst.functions.size()}};
  r["witnesses"]["flow_worst_vertex"] = vertex_ref(t, fc.worst_vertex);
  if (t.vertex_count() > 1) {
    const DoublingConstants dc = doubling_constants(t, m);
    const BoundaryDoubling bd = boundary_doubling_ratio(t, inst.nu);
    r["constants"]["c1"] = dc.c1;
    r["constants"]["c2"] = dc.c2;
    r["constants"]["locally_doubling"] = dc.locally_doubling();
    r["constants"]["boundary_doubling_ratio"] = bd.ratio;
    r["witnesses"]["boundary_doubling"] = {{"leaf", bd.leaf}, {"level", bd.level}};
    if (t.check_min_branching(2)) {
      const bool ok = bd.ratio <= dc.c1;
      r["constants"]["doubling_ratio_within_c1"] = ok;
      pass = pass && ok;
    }
  }
  if (!c.csv.empty()) write_csv(c.csv, t, m, {});
  return emit(out, std::move(r), pass);
}

int cmd_extend(const Common& c, const std::string& name, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const FlowMeasure m = inst.flow();
  const BoundaryFunction g = inst.boundary_function(name);
  const TreeFunction f = poisson_extend(t, inst.nu, g);
  const HarmonicCheck hc = is_harmonic(t, m, f);
  const BoundaryFunction hl = hl_maximal(t, inst.nu, g);
  const BoundaryFunction rad = radial_maximal(t, f);
  bool majorized = true;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    if (rad[i] > hl[i] && majorized) {
      majorized = false;
      worst = i;
    }
  }
  json r = header("extend", c.instance, std::nullopt);
  r["function"] = name;
  r["values"] = std::vector<double>(f.values().begin(), f.values().end());
  r["constants"] = {{"harmonic", hc.ok},
                    {"harmonic_worst_residual", hc.worst_residual},
                    {"majorized", majorized},
                    {"hl_maximal", std::vector<double>(hl.values().begin(), hl.values().end())},
                    {"radial_maximal", std::vector<double>(rad.values().begin(), rad.values().end())}};
  r["witnesses"]["harmonic_worst_vertex"] = vertex_ref(t, hc.worst_vertex);
  if (!majorized) r["witnesses"]["majorization_leaf"] = t.leaves()[worst];
  if (!c.csv.empty()) write_csv(c.csv, t, m, {{"poisson", {f.values().begin(), f.values().end()}}});
  return emit(out, std::move(r), hc.ok && majorized);
}

int cmd_norms(const Common& c, const std::string& name, const std::string& plist, bool sigma_flow,
              std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const FlowMeasure m = inst.flow();
  const std::vector<Exponent> ps = parse_exponents(plist);
  std::optional<VertexMeasure> sigma;
  if (inst.sigma || sigma_flow) sigma = resolve_sigma(inst, sigma_flow);
  const NamedFunction& nf = [&]() -> const NamedFunction& {
    const auto it = inst.functions.find(name);
    if (it == inst.functions.end()) throw UsageError("no function named '" + name + "'");
    return it->second;
  }();

  json r = header("norms", c.instance, std::nullopt);
  r["function"] = name;
  bool pass = true;
  json per_p = json::array();
  std::optional<TreeFunction> f;
  std::optional<BoundaryFunction> g;
  if (nf.domain == NamedFunction::Domain::Leaves) {
    g = BoundaryFunction(nf.values);
    f = poisson_extend(t, inst.nu, *g);
    const BmoNorm bmo = bmo_norm(t, inst.nu, *g);
    r["constants"]["bmo"] = bmo.value;
    r["witnesses"]["bmo_vertex"] = vertex_ref(t, bmo.vertex);
    r["constants"]["weak_l1_boundary"] = weak_l1_boundary(*g, inst.nu);
  } else {
    f = TreeFunction(nf.values);
  }
  if (sigma) r["constants"]["weak_l1_tree"] = weak_l1_tree(*f, *sigma);
  for (Exponent p : ps) {
    json e = {{"p", p.to_string()}, {"hardy", hardy_norm(t, m, *f, p)}};
    if (sigma) e["lp_tree"] = lp_tree(*f, *sigma, p);
    if (g) {
      e["lp_boundary"] = lp_boundary(*g, inst.nu, p);
      e["jensen_ok"] = e["hardy"].get<double>() <= e["lp_boundary"].get<double>() * (1.0 + kVerifySlack);
      pass = pass && e["jensen_ok"].get<bool>();
    }
    per_p.push_back(std::move(e));
  }
  r["constants"]["exponents"] = std::move(per_p);
  if (!c.csv.empty()) write_csv(c.csv, t, m, {{"f", {f->values().begin(), f->values().end()}}});
  return emit(out, std::move(r), pass);
}

int cmd_carleson(const Common& c, bool sigma_flow, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const VertexMeasure sigma = resolve_sigma(inst, sigma_flow);
  const CarlesonReport cr = carleson_constant(t, inst.nu, sigma);
  json r = header("carleson", c.instance, std::nullopt);
  r["constants"] = {{"carleson_constant", cr.constant}, {"ratios", cr.per_vertex_ratios}};
  r["witnesses"]["extremal_vertex"] = vertex_ref(t, cr.extremal_vertex);
  if (!c.csv.empty()) {
    write_csv(c.csv, t, inst.flow(),
              {{"sigma", {sigma.weights().begin(), sigma.weights().end()}},
               {"sigma_subtree", cr.subtree_mass},
               {"ratio", cr.per_vertex_ratios}});
  }
  return emit(out, std::move(r), true);
}

json opnorm_json(const Tree& t, const OpNormEstimate& e) {
  (void)t;
  return {{"p", e.p.to_string()},
          {"lower", e.lower},
          {"upper", e.upper},
          {"upper_finite", e.upper_finite},
          {"upper_kind", "interpolation bound 2(p/(p-1))^(1/p) C^(1/p)"},
          {"carleson_constant", e.carleson_constant},
          {"iterations", e.iterations},
          {"converged", e.converged},
          {"witness_origin", e.witness_origin}};
}

struct OpOpts {
  std::string p = "2";
  int iters = 200;
  int restarts = 8;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  bool sigma_flow = false;
};

int cmd_opnorm(const Common& c, const OpOpts& o, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const VertexMeasure sigma = resolve_sigma(inst, o.sigma_flow);
  OpNormConfig cfg{o.iters, o.restarts, o.tol, o.seed};
  const OpNormEstimate e = opnorm_poisson(t, inst.nu, sigma, Exponent::parse(o.p), cfg);
  json r = header("opnorm", c.instance, o.seed);
  r["constants"] = opnorm_json(t, e);
  r["witnesses"]["witness"] = std::vector<double>(e.witness.values().begin(), e.witness.values().end());
  const bool pass = !e.upper_finite || e.lower <= e.upper * (1.0 + kVerifySlack);
  return emit(out, std::move(r), pass);
}

int cmd_theorem2(const Common& c, const OpOpts& o, const std::string& plist, std::size_t trials, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const VertexMeasure sigma = resolve_sigma(inst, o.sigma_flow);
  const std::vector<Exponent> ps = parse_exponents(plist);
  OpNormConfig cfg{o.iters, o.restarts, o.tol, o.seed};
  const EquivalenceReport rep = verify_equivalence(t, inst.nu, sigma, ps, trials, o.seed, cfg);
  json r = header("theorem2", c.instance, o.seed);
  r["constants"]["carleson_constant"] = rep.carleson.constant;
  r["constants"]["weak11_max_ratio"] = rep.weak11.max_ratio;
  r["constants"]["weak11_ok"] = rep.weak11.ok;
  r["witnesses"]["carleson_vertex"] = vertex_ref(t, rep.carleson.extremal_vertex);
  r["witnesses"]["weak11_worst_trial"] = rep.weak11.worst_trial;
  json per_p = json::array();
  for (const ExponentVerdict& ev : rep.exponents) {
    json e = opnorm_json(t, ev.opnorm);
    e["strong_ratio_sup"] = ev.strong_ratio_sup;
    e["hardy_ratio_sup"] = ev.hardy_ratio_sup;
    e["hardy_ratio_probe"] = ev.hardy_ratio_probe;
    e["jensen_worst"] = ev.jensen_worst;
    e["converse_worst"] = ev.converse_worst;
    e["converse_vertex"] = vertex_ref(t, ev.converse_vertex);
    e["strong_ok"] = ev.strong_ok;
    e["hardy_ok"] = ev.hardy_ok;
    e["jensen_ok"] = ev.jensen_ok;
    e["converse_ok"] = ev.converse_ok;
    per_p.push_back(std::move(e));
  }
  r["constants"]["exponents"] = std::move(per_p);
  r["witnesses"]["failures"] = rep.failures;
  if (!c.csv.empty()) {
    write_csv(c.csv, t, inst.flow(),
              {{"sigma", {sigma.weights().begin(), sigma.weights().end()}},
               {"sigma_subtree", rep.carleson.subtree_mass},
               {"ratio", rep.carleson.per_vertex_ratios}});
  }
  return emit(out, std::move(r), rep.pass);
}

struct KOpts {
  std::optional<double> alpha;
  double delta = 0.5;
  std::optional<std::uint64_t> seed;
  std::string function;
  std::size_t trials = 10;
  std::string output;
};

int cmd_theorem3(const Common& c, const KOpts& o, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const FlowMeasure m = inst.flow();
  std::optional<Kernel> k = inst.kernel;
  std::string source = "instance";
  if (k && o.alpha) {
    k = Kernel(k->rows(), k->cols(), std::vector<double>(k->entries().begin(), k->entries().end()), *o.alpha);
  }
  if (!k) {
    k = example_kernel_delta(t, inst.nu, m, o.alpha.value_or(1.0), o.delta, o.seed).kernel;
    source = "generated";
  }
  json r = header("theorem3", c.instance, o.seed.value_or(0));
  r["kernel_source"] = source;
  const KernelAudit audit = audit_kernel(t, inst.nu, m, *k);
  r["constants"]["audit"] = audit_json(t, audit);
  if (!audit.ok()) {
    r["witnesses"]["failure"] = audit.cancellation_ok ? "decay condition" : "cancellation condition";
    return emit(out, std::move(r), false);
  }
  bool pass = true;
  json cases = json::array();
  for (const auto& [label, b] : resolve_b(inst, o.function, o.trials, o.seed.value_or(0))) {
    const Theorem3Verdict v = verify_bmo_to_carleson(t, inst.nu, m, *k, b);
    cases.push_back({{"b", label},
                     {"bmo", v.bound.bmo},
                     {"c1", v.bound.c1},
                     {"c2", v.bound.c2},
                     {"c_alpha", v.bound.c_alpha},
                     {"bound", v.bound.value},
                     {"ratio", v.ratio},
                     {"witness", vertex_ref(t, v.witness)},
                     {"pass", v.pass}});
    pass = pass && v.pass;
  }
  r["constants"]["cases"] = std::move(cases);
  return emit(out, std::move(r), pass);
}

int cmd_atoms(const Common& c, const KOpts& o, std::ostream& out) {
  const Instance inst = load_instance(c.instance);
  const Tree& t = inst.tree;
  const FlowMeasure m = inst.flow();
  json r = header("atoms", c.instance, o.seed.value_or(0));
  bool pass = true;
  json cases = json::array();
  for (const auto& [label, b] : resolve_b(inst, o.function, o.trials, o.seed.value_or(0))) {
    const BmoNorm bmo = bmo_norm(t, inst.nu, b);
    const BmoFromCarleson rec = bmo_from_carleson(t, inst.nu, m, b);
    double identity_defect = 0.0;
    VertexId identity_vertex = kNoVertex;
    for (VertexId y = 0; y < t.vertex_count(); ++y) {
      const Atom a = atom(t, inst.nu, m, y, b);
      const double lhs = 2.0 * m[y] * std::abs(a.pairing);
      const double defect = std::abs(lhs - a.oscillation_mass) / std::max(1.0, a.oscillation_mass);
      if (defect > identity_defect || identity_vertex == kNoVertex) {
        identity_defect = defect;
        identity_vertex = y;
      }
    }
    const double reconstruction_defect = std::abs(bmo.value - rec.bmo_reconstructed()) / std::max(1.0, bmo.value);
    const bool ok = identity_defect <= 1e-12 && reconstruction_defect <= 1e-12;
    pass = pass && ok;
    cases.push_back({{"b", label},
                     {"bmo", bmo.value},
                     {"bmo_vertex", vertex_ref(t, bmo.vertex)},
                     {"atom_sup", rec.value},
                     {"atom_vertex", vertex_ref(t, rec.vertex)},
                     {"reconstructed", rec.bmo_reconstructed()},
                     {"reconstruction_defect", reconstruction_defect},
                     {"identity_defect", identity_defect},
                     {"identity_vertex", vertex_ref(t, identity_vertex)},
                     {"pass", ok}});
  }
  r["constants"]["cases"] = std::move(cases);
  return emit(out, std::move(r), pass);
}

int cmd_kernelgen(const Common& c, const KOpts& o, std::ostream& out) {
  Instance inst = load_instance(c.instance);
  const FlowMeasure m = inst.flow();
  const double alpha = o.alpha.value_or(1.0);
  ExampleKernel ek = example_kernel_delta(inst.tree, inst.nu, m, alpha, o.delta, o.seed);
  const KernelAudit audit = audit_kernel(inst.tree, inst.nu, m, ek.kernel);
  inst.kernel = ek.kernel;
  inst.meta["kernel"] = "alpha=" + fmt(alpha) + " delta=" + fmt(o.delta) +
                        (o.seed ? " seed=" + std::to_string(*o.seed) : std::string(" seed=none"));
  if (o.output.empty()) {
    out << serialize_instance(inst);
    return audit.ok() ? kExitPass : kExitFail;
  }
  save_instance(inst, o.output);
  json r = header("kernelgen", c.instance, o.seed.value_or(0));
  r["output"] = o.output;
  r["constants"]["audit"] = audit_json(inst.tree, audit);
  r["constants"]["ck_bound"] = ek.ck_bound;
  r["constants"]["ck_bound_instance"] = ek.ck_bound_instance;
  r["constants"]["k0"] = ek.k0;
  r["witnesses"]["degenerate_rows"] = ek.degenerate_rows;
  const bool pass = audit.ok() && audit.ck <= ek.ck_bound_instance * (1.0 + kVerifySlack);
  return emit(out, std::move(r), pass);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic analysis on finite rooted trees: instances, norms and verifiers", "harmtree"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  std::function<int()> action;

  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("instance", common.instance, "Instance file (JSON)")->required();
    sub->add_option("--csv", common.csv, "Write a per-vertex table to this path");
  };

  GenOpts gen;
  auto* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--depth", gen.depth, "Tree depth")->required()->check(CLI::PositiveNumber);
  g->add_option("--branching", gen.branching, "Branching range: LO [HI]")->expected(1, 2);
  g->add_option("--nu", gen.nu_law, "Boundary measure law")->check(CLI::IsMember({"uniform", "log-uniform"}));
  g->add_option("--nu-range", gen.nu_range, "Log-uniform range: A B")->expected(2);
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--sigma", gen.sigma, "Vertex measure")->check(CLI::IsMember({"none", "flow", "random", "spike"}));
  g->add_option("-o,--output", gen.output, "Write the instance here and print a report");
  g->callback([&] { action = [&] { return cmd_gen(gen, out); }; });

  auto* check = app.add_subcommand("check", "Validate structure, flow and doubling constants");
  add_instance(check);
  check->callback([&] { action = [&] { return cmd_check(common, out); }; });

  std::string fname;
  auto* ext = app.add_subcommand("extend", "Poisson extension of a named boundary function");
  add_instance(ext);
  ext->add_option("--function", fname, "Function name")->required();
  ext->callback([&] { action = [&] { return cmd_extend(common, fname, out); }; });

  std::string plist = "1,2,inf";
  bool sigma_flow = false;
  auto* norms = app.add_subcommand("norms", "Lp, Hp, weak L1 and BMO norms of a named function");
  add_instance(norms);
  norms->add_option("--function", fname, "Function name")->required();
  norms->add_option("--p", plist, "Comma-separated exponents (inf allowed)");
  norms->add_flag("--sigma-flow", sigma_flow, "Use sigma = m when the instance has none");
  norms->callback([&] { action = [&] { return cmd_norms(common, fname, plist, sigma_flow, out); }; });

  auto* carl = app.add_subcommand("carleson", "Carleson constant and per-vertex ratios");
  add_instance(carl);
  carl->add_flag("--sigma-flow", sigma_flow, "Use sigma = m when the instance has none");
  carl->callback([&] { action = [&] { return cmd_carleson(common, sigma_flow, out); }; });

  OpOpts op;
  auto add_op = [&](CLI::App* sub) {
    sub->add_option("--iters", op.iters, "Maximum sweeps per start")->check(CLI::PositiveNumber);
    sub->add_option("--restarts", op.restarts, "Random restarts")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", op.tol, "Relative convergence tolerance");
    sub->add_option("--seed", op.seed, "RNG seed");
    sub->add_flag("--sigma-flow", op.sigma_flow, "Use sigma = m when the instance has none");
  };
  auto* opn = app.add_subcommand("opnorm", "Estimate the norm of P: Lp(nu) -> Lp(sigma)");
  add_instance(opn);
  opn->add_option("--p", op.p, "Exponent in (1, inf)");
  add_op(opn);
  opn->callback([&] { action = [&] { return cmd_opnorm(common, op, out); }; });

  std::string t2_plist = "1.5,2,3";
  std::size_t trials = 20;
  auto* t2 = app.add_subcommand("theorem2", "Carleson / Poisson boundedness / Hardy space equivalence");
  add_instance(t2);
  t2->add_option("--p", t2_plist, "Comma-separated exponents in (1, inf)");
  t2->add_option("--trials", trials, "Random probes");
  add_op(t2);
  t2->callback([&] { action = [&] { return cmd_theorem2(common, op, t2_plist, trials, out); }; });

  KOpts ko;
  auto add_b = [&](CLI::App* sub) {
    sub->add_option("--function", ko.function, "Boundary function name (default: random functions)");
    sub->add_option("--trials", ko.trials, "Random functions when --function is absent");
    sub->add_option("--seed", ko.seed, "RNG seed");
  };
  auto* t3 = app.add_subcommand("theorem3", "Kernel audit and BMO to Carleson bound");
  add_instance(t3);
  t3->add_option("--alpha", ko.alpha, "Decay exponent")->check(CLI::PositiveNumber);
  t3->add_option("--delta", ko.delta, "Extra decay of the generated kernel")->check(CLI::PositiveNumber);
  add_b(t3);
  t3->callback([&] { action = [&] { return cmd_theorem3(common, ko, out); }; });

  auto* atoms = app.add_subcommand("atoms", "BMO norm reconstructed from atom kernels");
  add_instance(atoms);
  add_b(atoms);
  atoms->callback([&] { action = [&] { return cmd_atoms(common, ko, out); }; });

  auto* kg = app.add_subcommand("kernelgen", "Add an example decay kernel to an instance");
  add_instance(kg);
  kg->add_option("--alpha", ko.alpha, "Decay exponent")->check(CLI::PositiveNumber);
  kg->add_option("--delta", ko.delta, "Extra decay")->check(CLI::PositiveNumber);
  kg->add_option("--seed", ko.seed, "Random ring pairs (default: two largest)");
  kg->add_option("-o,--output", ko.output, "Write the instance here and print a report");
  kg->callback([&] { action = [&] { return cmd_kernelgen(common, ko, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace harmtree
