#include "harmtree/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harmtree/error.hpp"
#include "harmtree/random.hpp"

namespace harmtree {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field " + path + ": " + what);
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers_at(const json& j, const std::string& path) {
  if (!j.is_array()) bad_field(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::size_t count_at(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) bad_field(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace

Instance Instance::make(std::vector<std::optional<VertexId>> parents, std::vector<double> nu,
                        std::optional<std::vector<double>> sigma, std::map<std::string, NamedFunction> functions,
                        std::optional<Kernel> kernel, std::map<std::string, std::string> meta) {
  auto wrap = [](const std::string& invariant, auto&& build) {
    try {
      return build();
    } catch (const Error& e) {
      invalid(invariant + ": " + e.what());
    }
  };
  Tree tree = wrap("tree", [&] { return Tree::build_from_parents(parents); });
  if (nu.size() != tree.leaf_count()) {
    invalid("nu has " + std::to_string(nu.size()) + " entries but the tree has " +
            std::to_string(tree.leaf_count()) + " leaves");
  }
  BoundaryMeasure bm = wrap("nu", [&] { return BoundaryMeasure(std::move(nu)); });
  std::optional<VertexMeasure> vm;
  if (sigma) {
    if (sigma->size() != tree.vertex_count()) {
      invalid("sigma has " + std::to_string(sigma->size()) + " entries but the tree has " +
              std::to_string(tree.vertex_count()) + " vertices");
    }
    vm = wrap("sigma", [&] { return VertexMeasure(std::move(*sigma)); });
  }
  for (const auto& [name, f] : functions) {
    const std::size_t want =
        f.domain == NamedFunction::Domain::Leaves ? tree.leaf_count() : tree.vertex_count();
    if (f.values.size() != want) {
      invalid("function '" + name + "' has " + std::to_string(f.values.size()) + " values, expected " +
              std::to_string(want));
    }
    for (double v : f.values) {
      if (!std::isfinite(v)) invalid("function '" + name + "' has a non-finite value");
    }
  }
  if (kernel && (kernel->rows() != tree.vertex_count() || kernel->cols() != tree.leaf_count())) {
    invalid("kernel must be " + std::to_string(tree.vertex_count()) + "x" + std::to_string(tree.leaf_count()));
  }
  return Instance{std::move(parents), std::move(tree), std::move(bm), std::move(vm),
                  std::move(functions), std::move(kernel), std::move(meta)};
}

BoundaryFunction Instance::boundary_function(const std::string& name) const {
  const auto it = functions.find(name);
  if (it == functions.end()) throw Error(ErrorCode::InvalidArgument, "no function named '" + name + "'");
  if (it->second.domain != NamedFunction::Domain::Leaves) {
    throw Error(ErrorCode::InvalidArgument, "function '" + name + "' is not defined on the leaves");
  }
  return BoundaryFunction(it->second.values);
}

TreeFunction Instance::tree_function(const std::string& name) const {
  const auto it = functions.find(name);
  if (it == functions.end()) throw Error(ErrorCode::InvalidArgument, "no function named '" + name + "'");
  if (it->second.domain != NamedFunction::Domain::Vertices) {
    throw Error(ErrorCode::InvalidArgument, "function '" + name + "' is not defined on the vertices");
  }
  return TreeFunction(it->second.values);
}

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Locate the byte offset as line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) bad_field("/", "expected an object");
  if (!doc.contains("format") || !doc["format"].is_string()) bad_field("/format", "missing format tag");
  if (doc["format"].get<std::string>() != kInstanceFormat) {
    bad_field("/format", "unsupported format '" + doc["format"].get<std::string>() + "'");
  }

  if (!doc.contains("parents") || !doc["parents"].is_array()) bad_field("/parents", "expected an array");
  std::vector<std::optional<VertexId>> parents;
  for (std::size_t i = 0; i < doc["parents"].size(); ++i) {
    const json& p = doc["parents"][i];
    if (p.is_null()) {
      parents.emplace_back(std::nullopt);
    } else {
      parents.emplace_back(count_at(p, "/parents/" + std::to_string(i)));
    }
  }
  if (!doc.contains("nu")) bad_field("/nu", "missing");
  std::vector<double> nu = numbers_at(doc["nu"], "/nu");

  std::optional<std::vector<double>> sigma;
  if (doc.contains("sigma")) sigma = numbers_at(doc["sigma"], "/sigma");

  std::map<std::string, NamedFunction> functions;
  if (doc.contains("functions")) {
    const json& fs = doc["functions"];
    if (!fs.is_object()) bad_field("/functions", "expected an object");
    for (const auto& [name, f] : fs.items()) {
      const std::string path = "/functions/" + name;
      if (!f.is_object()) bad_field(path, "expected an object");
      NamedFunction nf;
      const std::string domain = f.value("domain", "");
      if (domain == "leaves") {
        nf.domain = NamedFunction::Domain::Leaves;
      } else if (domain == "vertices") {
        nf.domain = NamedFunction::Domain::Vertices;
      } else {
        bad_field(path + "/domain", "expected \"leaves\" or \"vertices\"");
      }
      if (!f.contains("values")) bad_field(path + "/values", "missing");
      nf.values = numbers_at(f["values"], path + "/values");
      functions.emplace(name, std::move(nf));
    }
  }

  std::optional<Kernel> kernel;
  if (doc.contains("kernel")) {
    const json& k = doc["kernel"];
    if (!k.is_object()) bad_field("/kernel", "expected an object");
    for (const char* key : {"alpha", "rows", "cols", "entries"}) {
      if (!k.contains(key)) bad_field(std::string("/kernel/") + key, "missing");
    }
    const double alpha = number_at(k["alpha"], "/kernel/alpha");
    const std::size_t rows = count_at(k["rows"], "/kernel/rows");
    const std::size_t cols = count_at(k["cols"], "/kernel/cols");
    const json& e = k["entries"];
    if (!e.is_array() || e.size() != rows) bad_field("/kernel/entries", "expected " + std::to_string(rows) + " rows");
    std::vector<double> entries;
    entries.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string path = "/kernel/entries/" + std::to_string(r);
      std::vector<double> row = numbers_at(e[r], path);
      if (row.size() != cols) bad_field(path, "expected " + std::to_string(cols) + " columns");
      entries.insert(entries.end(), row.begin(), row.end());
    }
    try {
      kernel.emplace(rows, cols, std::move(entries), alpha);
    } catch (const Error& err) {
      invalid(std::string("kernel: ") + err.what());
    }
  }

  std::map<std::string, std::string> meta;
  if (doc.contains("meta")) {
    if (!doc["meta"].is_object()) bad_field("/meta", "expected an object");
    for (const auto& [key, v] : doc["meta"].items()) meta[key] = v.is_string() ? v.get<std::string>() : v.dump();
  }

  return Instance::make(std::move(parents), std::move(nu), std::move(sigma), std::move(functions),
                        std::move(kernel), std::move(meta));
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string serialize_instance(const Instance& inst) {
  json doc = json::object();
  doc["format"] = kInstanceFormat;
  json parents = json::array();
  for (const auto& p : inst.parents) parents.push_back(p ? json(*p) : json(nullptr));
  doc["parents"] = std::move(parents);
  doc["nu"] = std::vector<double>(inst.nu.weights().begin(), inst.nu.weights().end());
  if (inst.sigma) doc["sigma"] = std::vector<double>(inst.sigma->weights().begin(), inst.sigma->weights().end());
  if (!inst.functions.empty()) {
    json fs = json::object();
    for (const auto& [name, f] : inst.functions) {
      fs[name] = {{"domain", f.domain == NamedFunction::Domain::Leaves ? "leaves" : "vertices"}, {"values", f.values}};
    }
    doc["functions"] = std::move(fs);
  }
  if (inst.kernel) {
    const Kernel& k = *inst.kernel;
    json rows = json::array();
    for (std::size_t r = 0; r < k.rows(); ++r) {
      rows.push_back(std::vector<double>(k.row(r).begin(), k.row(r).end()));
    }
    doc["kernel"] = {{"alpha", k.alpha()}, {"rows", k.rows()}, {"cols", k.cols()}, {"entries", std::move(rows)}};
  }
  if (!inst.meta.empty()) doc["meta"] = inst.meta;
  return doc.dump(1) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << serialize_instance(inst);
}

Instance generate(const GenSpec& spec) {
  if (spec.depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be at least 1");
  if (spec.branch_lo < 1 || spec.branch_hi < spec.branch_lo) {
    throw Error(ErrorCode::InvalidArgument, "branching range must satisfy 1 <= lo <= hi");
  }
  if (spec.nu_law == GenSpec::NuLaw::LogUniform && !(spec.nu_lo > 0.0 && spec.nu_lo <= spec.nu_hi)) {
    throw Error(ErrorCode::InvalidArgument, "log-uniform range must satisfy 0 < a <= b");
  }
  Rng rng(spec.seed);
  std::vector<std::optional<VertexId>> parents{std::nullopt};
  std::vector<int> depth{0};
  for (VertexId x = 0; x < parents.size(); ++x) {
    if (depth[x] == spec.depth) continue;
    const auto kids = rng.uniform_int(spec.branch_lo, spec.branch_hi);
    for (std::int64_t c = 0; c < kids; ++c) {
      parents.emplace_back(x);
      depth.push_back(depth[x] + 1);
    }
  }
  std::size_t leaves = 0;
  for (int d : depth) leaves += d == spec.depth ? 1 : 0;
  std::vector<double> nu(leaves, 1.0);
  if (spec.nu_law == GenSpec::NuLaw::LogUniform) {
    const double a = std::log(spec.nu_lo), b = std::log(spec.nu_hi);
    for (double& w : nu) w = std::exp(rng.uniform(a, b));
  }
  std::map<std::string, std::string> meta{
      {"generator", "depth=" + std::to_string(spec.depth) + " branching=" + std::to_string(spec.branch_lo) + ".." +
                        std::to_string(spec.branch_hi) +
                        (spec.nu_law == GenSpec::NuLaw::Uniform ? " nu=uniform" : " nu=log-uniform")},
      {"rng", std::string(Rng::kAlgorithm)},
      {"seed", std::to_string(spec.seed)}};
  return Instance::make(std::move(parents), std::move(nu), std::nullopt, {}, std::nullopt, std::move(meta));
}

}  // namespace harmtree
