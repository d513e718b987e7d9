#include "sdlab/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"

namespace sdlab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::config, "cli_reports", path + ": " + what);
}

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) fail(at(path, k), "unknown key");
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(at(path, key), "missing required key");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

int small_int(const json& v, const std::string& path, long long lo, long long hi) {
  const long long x = integer(v, path);
  if (x < lo || x > hi) {
    std::ostringstream os;
    os << "expected an integer in [" << lo << ", " << hi << "], got " << x;
    fail(path, os.str());
  }
  return static_cast<int>(x);
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(path, "expected a positive number");
  return x;
}

std::uint64_t seed_value(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

const json& array_of(const json& v, const std::string& path, std::size_t size = 0) {
  if (!v.is_array()) fail(path, "expected an array");
  if (size && v.size() != size) fail(path, "expected " + std::to_string(size) + " entries");
  return v;
}

std::vector<double> doubles(const json& v, const std::string& path, std::size_t size) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array_of(v, path, size).size(); ++i) out.push_back(number(v[i], at(path, i)));
  return out;
}

Term parse_term(const json& t, const std::string& path, int dim) {
  Term term;
  term.coeff = number(require(t, path, "c"), at(path, "c"));
  if (t.contains("pow")) {
    const auto& p = array_of(t.at("pow"), at(path, "pow"), dim);
    for (std::size_t i = 0; i < p.size(); ++i)
      term.powers.push_back(small_int(p[i], at(at(path, "pow"), i), 0, 16));
  }
  const std::string trig = t.contains("trig") ? t.at("trig").is_string()
                                                    ? t.at("trig").get<std::string>()
                                                    : (fail(at(path, "trig"), "expected a string"), "")
                                              : "none";
  if (trig == "none") term.trig = Trig::none;
  else if (trig == "cos") term.trig = Trig::cos;
  else if (trig == "sin") term.trig = Trig::sin;
  else fail(at(path, "trig"), "expected one of none, cos, sin");
  if (t.contains("k")) {
    if (term.trig == Trig::none) fail(at(path, "k"), "wave vector given without trig");
    term.wave = doubles(t.at("k"), at(path, "k"), dim);
  } else if (term.trig != Trig::none) {
    fail(at(path, "k"), "missing required key (trig term)");
  }
  return term;
}

ChartField parse_family(const json& doc, const std::string& path) {
  const json& fam = require(doc, path, "family");
  if (!fam.is_string()) fail(at(path, "family"), "expected a string");
  const std::string name = fam.get<std::string>();
  if (name == "constant_2d") {
    only_keys(doc, path, {"family", "b0"});
    return fields::constant_2d(positive(require(doc, path, "b0"), at(path, "b0")));
  }
  if (name == "cosine_2d") {
    only_keys(doc, path, {"family", "b0", "eps", "x0"});
    const double b0 = positive(require(doc, path, "b0"), at(path, "b0"));
    const double eps = number(require(doc, path, "eps"), at(path, "eps"));
    std::vector<double> x0{0.0, 0.0};
    if (doc.contains("x0")) x0 = doubles(doc.at("x0"), at(path, "x0"), 2);
    return fields::cosine_2d(b0, eps, x0);
  }
  only_keys(doc, path, {"family", "n", "seed"});
  const int n = small_int(require(doc, path, "n"), at(path, "n"), 1, 3);
  const std::uint64_t seed = seed_value(require(doc, path, "seed"), at(path, "seed"));
  if (name == "random_local") return fields::random_local(n, seed);
  if (name == "almost_kahler") return fields::almost_kahler(n, seed);
  if (name == "kahler_potential") return fields::kahler_potential(n, seed);
  if (name == "degenerate") return fields::degenerate(n, seed);
  fail(at(path, "family"), "unknown family '" + name + "'");
}

std::vector<TrigMode> parse_modes(const json& v, const std::string& path) {
  std::vector<TrigMode> out;
  for (std::size_t i = 0; i < array_of(v, path).size(); ++i) {
    const std::string p = at(path, i);
    only_keys(v[i], p, {"mx", "my", "c", "s"});
    TrigMode m;
    m.mx = small_int(require(v[i], p, "mx"), at(p, "mx"), -64, 64);
    m.my = small_int(require(v[i], p, "my"), at(p, "my"), -64, 64);
    if (v[i].contains("c")) m.c = number(v[i].at("c"), at(p, "c"));
    if (v[i].contains("s")) m.s = number(v[i].at("s"), at(p, "s"));
    out.push_back(m);
  }
  return out;
}

json term_json(const Term& t, bool with_index, int i, int j) {
  json o;
  o["i"] = i;
  if (with_index) o["j"] = j;
  o["c"] = t.coeff;
  o["pow"] = t.powers;
  if (t.trig != Trig::none) {
    o["k"] = t.wave;
    o["trig"] = t.trig == Trig::cos ? "cos" : "sin";
  }
  return o;
}

json modes_json(const std::vector<TrigMode>& modes) {
  json a = json::array();
  for (const auto& m : modes) a.push_back({{"mx", m.mx}, {"my", m.my}, {"c", m.c}, {"s", m.s}});
  return a;
}

}  // namespace

ChartField parse_field(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  if (doc.contains("family")) {
    ChartField f = parse_family(doc, path);
    f.validate();
    return f;
  }
  only_keys(doc, path, {"n", "x0", "g", "A"});
  const int n = small_int(require(doc, path, "n"), at(path, "n"), 1, 4);
  const int dim = 2 * n;
  ChartField f = ChartField::zero(n);
  if (doc.contains("x0")) f.x0 = doubles(doc.at("x0"), at(path, "x0"), dim);

  const std::string gp = at(path, "g");
  const json& g = array_of(require(doc, path, "g"), gp);
  for (std::size_t t = 0; t < g.size(); ++t) {
    const std::string p = at(gp, t);
    only_keys(g[t], p, {"i", "j", "c", "pow", "k", "trig"});
    const int i = small_int(require(g[t], p, "i"), at(p, "i"), 0, dim - 1);
    const int j = small_int(require(g[t], p, "j"), at(p, "j"), 0, dim - 1);
    if (i > j) fail(p, "metric terms need i <= j (the lower triangle is mirrored)");
    const Term term = parse_term(g[t], p, dim);
    f.g_entry(i, j).add_term(term);
    if (i != j) f.g_entry(j, i).add_term(term);
  }
  const std::string ap = at(path, "A");
  const json& A = array_of(require(doc, path, "A"), ap);
  for (std::size_t t = 0; t < A.size(); ++t) {
    const std::string p = at(ap, t);
    only_keys(A[t], p, {"i", "c", "pow", "k", "trig"});
    const int i = small_int(require(A[t], p, "i"), at(p, "i"), 0, dim - 1);
    f.A[i].add_term(parse_term(A[t], p, dim));
  }
  try {
    f.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return f;
}

TorusConfig parse_torus(const json& doc, const std::string& path) {
  only_keys(doc, path, {"Nx", "Ny", "Lx", "Ly", "b0", "n_flux", "b_modes", "w0", "w_modes",
                        "p_list", "eig_tol", "max_restarts", "seed", "quad_points"});
  TorusConfig c;
  c.Nx = small_int(require(doc, path, "Nx"), at(path, "Nx"), 3, 4096);
  c.Ny = small_int(require(doc, path, "Ny"), at(path, "Ny"), 3, 4096);
  c.Lx = positive(require(doc, path, "Lx"), at(path, "Lx"));
  const bool has_b0 = doc.contains("b0"), has_nf = doc.contains("n_flux"), has_ly = doc.contains("Ly");
  if (has_b0 + has_nf + has_ly != 2)
    fail(path, "give exactly two of Ly, b0, n_flux (the third follows from the flux)");
  const double two_pi = 2.0 * std::numbers::pi;
  if (has_nf) {
    const int nf = small_int(doc.at("n_flux"), at(path, "n_flux"), 1, 1000);
    if (has_b0) {
      c.b0 = positive(doc.at("b0"), at(path, "b0"));
      c.Ly = two_pi * nf / (c.b0 * c.Lx);
    } else {
      c.Ly = positive(doc.at("Ly"), at(path, "Ly"));
      c.b0 = two_pi * nf / (c.Lx * c.Ly);
    }
  } else {
    c.b0 = positive(doc.at("b0"), at(path, "b0"));
    c.Ly = positive(doc.at("Ly"), at(path, "Ly"));
  }
  if (doc.contains("b_modes")) c.b_modes = parse_modes(doc.at("b_modes"), at(path, "b_modes"));
  if (doc.contains("w0")) c.w0 = positive(doc.at("w0"), at(path, "w0"));
  if (doc.contains("w_modes")) c.w_modes = parse_modes(doc.at("w_modes"), at(path, "w_modes"));
  const std::string pp = at(path, "p_list");
  const json& pl = array_of(require(doc, path, "p_list"), pp);
  for (std::size_t i = 0; i < pl.size(); ++i) c.p_list.push_back(small_int(pl[i], at(pp, i), 1, 1000));
  if (doc.contains("eig_tol")) c.eig_tol = positive(doc.at("eig_tol"), at(path, "eig_tol"));
  if (doc.contains("max_restarts"))
    c.max_restarts = small_int(doc.at("max_restarts"), at(path, "max_restarts"), 1, 100000);
  if (doc.contains("seed")) c.seed = seed_value(doc.at("seed"), at(path, "seed"));
  if (doc.contains("quad_points"))
    c.quad_points = small_int(doc.at("quad_points"), at(path, "quad_points"), 4, 4096);
  try {
    c.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return c;
}

json field_to_json(const ChartField& f) {
  json o;
  o["n"] = f.n;
  o["x0"] = f.x0;
  json g = json::array();
  for (int i = 0; i < f.dim(); ++i)
    for (int j = i; j < f.dim(); ++j)
      for (const auto& t : f.g_entry(i, j).terms()) g.push_back(term_json(t, true, i, j));
  o["g"] = g;
  json A = json::array();
  for (int i = 0; i < f.dim(); ++i)
    for (const auto& t : f.A[i].terms()) A.push_back(term_json(t, false, i, 0));
  o["A"] = A;
  return o;
}

json torus_to_json(const TorusConfig& c) {
  json o;
  o["Nx"] = c.Nx;
  o["Ny"] = c.Ny;
  o["Lx"] = c.Lx;
  o["Ly"] = c.Ly;
  o["b0"] = c.b0;
  o["b_modes"] = modes_json(c.b_modes);
  o["w0"] = c.w0;
  o["w_modes"] = modes_json(c.w_modes);
  o["p_list"] = c.p_list;
  o["eig_tol"] = c.eig_tol;
  o["max_restarts"] = c.max_restarts;
  o["seed"] = c.seed;
  o["quad_points"] = c.quad_points;
  return o;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  const std::string root = "$";
  only_keys(doc, root, {"mode", "field", "field_file", "battery", "torus", "tolerances", "seed",
                        "out"});
  RunConfig rc;
  if (doc.contains("mode")) {
    const json& m = doc.at("mode");
    static const std::set<std::string> modes{"identities", "rho", "oracle-compare", "torus",
                                             "selfcheck"};
    if (!m.is_string() || !modes.count(m.get<std::string>()))
      fail("$.mode", "expected one of identities, rho, oracle-compare, torus, selfcheck");
    rc.mode = m.get<std::string>();
  }
  if (doc.contains("field") && doc.contains("field_file"))
    fail(root, "give either field or field_file, not both");
  if (doc.contains("field")) {
    rc.field = parse_field(doc.at("field"), "$.field");
  } else if (doc.contains("field_file")) {
    if (!doc.at("field_file").is_string()) fail("$.field_file", "expected a string");
    std::filesystem::path p = doc.at("field_file").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) fail("$.field_file", "cannot open '" + p.string() + "'");
    json fd;
    try {
      fd = json::parse(in);
    } catch (const json::parse_error& e) {
      fail("$.field_file", p.string() + ": " + e.what());
    }
    rc.field = parse_field(fd, "$.field_file");
  }
  if (doc.contains("battery")) {
    const json& b = doc.at("battery");
    const std::string bp = "$.battery";
    only_keys(b, bp, {"n", "count", "family", "degree"});
    if (b.contains("n")) {
      rc.battery.n_values.clear();
      const json& ns = array_of(b.at("n"), at(bp, "n"));
      for (std::size_t i = 0; i < ns.size(); ++i)
        rc.battery.n_values.push_back(small_int(ns[i], at(at(bp, "n"), i), 1, 3));
    }
    if (b.contains("count")) rc.battery.count = small_int(b.at("count"), at(bp, "count"), 1, 100000);
    if (b.contains("family")) {
      static const std::set<std::string> fams{"random_local", "almost_kahler", "kahler_potential",
                                              "degenerate"};
      if (!b.at("family").is_string() || !fams.count(b.at("family").get<std::string>()))
        fail(at(bp, "family"),
             "expected one of random_local, almost_kahler, kahler_potential, degenerate");
      rc.battery.family = b.at("family").get<std::string>();
    }
    if (b.contains("degree")) rc.battery.degree = small_int(b.at("degree"), at(bp, "degree"), 6, 12);
  }
  if (doc.contains("torus")) rc.torus = parse_torus(doc.at("torus"), "$.torus");
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    const std::string tp = "$.tolerances";
    only_keys(t, tp, {"rho_agreement", "polar_agreement", "identity", "jet_invariants"});
    if (t.contains("rho_agreement")) rc.tol.rho_agreement = positive(t.at("rho_agreement"), at(tp, "rho_agreement"));
    if (t.contains("polar_agreement")) rc.tol.polar_agreement = positive(t.at("polar_agreement"), at(tp, "polar_agreement"));
    if (t.contains("identity")) rc.tol.identity = positive(t.at("identity"), at(tp, "identity"));
    if (t.contains("jet_invariants")) rc.tol.jet_invariants = positive(t.at("jet_invariants"), at(tp, "jet_invariants"));
  }
  if (doc.contains("seed")) rc.seed = seed_value(doc.at("seed"), "$.seed");
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) fail("$.out", "expected a string");
    rc.out_dir = doc.at("out").get<std::string>();
  }

  json c;
  c["mode"] = rc.mode;
  c["field"] = rc.field ? field_to_json(*rc.field) : json(nullptr);
  c["battery"] = {{"n", rc.battery.n_values},
                  {"count", rc.battery.count},
                  {"family", rc.battery.family},
                  {"degree", rc.battery.degree}};
  c["torus"] = rc.torus ? torus_to_json(*rc.torus) : json(nullptr);
  c["seed"] = rc.seed;
  rc.canonical = c;
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("$", "cannot open config '" + file.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("$", file.string() + ": " + e.what());
  }
  return parse_run_config(doc, file.parent_path());
}

std::string config_hash(const json& doc) {
  const std::string s = doc.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::numerical, "cli_reports", "SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace sdlab
