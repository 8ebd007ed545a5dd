#include "nzfit/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>

namespace nzfit {

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  model.seed = s;
  fit.schedule.seed = s;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return x;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& v)>;

std::map<std::string, std::map<std::string, Setter>> setters() {
  auto D = [](auto getter) {
    return Setter([getter](RunConfig& c, const std::string& k, const std::string& v) {
      getter(c) = to_double(k, v);
    });
  };
  auto I = [](auto getter) {
    return Setter([getter](RunConfig& c, const std::string& k, const std::string& v) {
      getter(c) = static_cast<std::remove_reference_t<decltype(getter(c))>>(to_int(k, v));
    });
  };
  std::map<std::string, std::map<std::string, Setter>> s;
  auto& m = s["model"];
  m["h_x"] = D([](RunConfig& c) -> double& { return c.model.h_x; });
  m["D"] = D([](RunConfig& c) -> double& { return c.model.D; });
  m["E"] = D([](RunConfig& c) -> double& { return c.model.E; });
  m["A_XX"] = D([](RunConfig& c) -> double& { return c.model.A_XX; });
  m["A_XY"] = D([](RunConfig& c) -> double& { return c.model.A_XY; });
  m["A_XZ"] = D([](RunConfig& c) -> double& { return c.model.A_XZ; });
  m["h_x0"] = D([](RunConfig& c) -> double& { return c.model.h_x0; });
  m["beta_dd"] = D([](RunConfig& c) -> double& { return c.model.beta_dd; });
  m["kBT"] = D([](RunConfig& c) -> double& { return c.model.kBT; });
  m["n_spins"] = I([](RunConfig& c) -> int& { return c.model.n_spins; });
  m["lattice_radius"] = I([](RunConfig& c) -> int& { return c.model.lattice_radius; });
  m["zfs_axis"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "z")
      c.model.zfs_axis = ZfsAxis::z;
    else if (v == "x")
      c.model.zfs_axis = ZfsAxis::x;
    else
      throw ConfigError("bad value for " + k + ": '" + v + "' (expected z or x)");
  };
  auto& b = s["bath"];
  b["n_B"] = I([](RunConfig& c) -> int& { return c.n_B; });
  b["dense_limit"] = I([](RunConfig& c) -> std::size_t& { return c.truncate.dense_limit; });
  b["degeneracy_tol"] = D([](RunConfig& c) -> double& { return c.truncate.degeneracy_tol; });
  b["lanczos_tol"] = D([](RunConfig& c) -> double& { return c.truncate.lanczos.tol; });
  b["lanczos_basis"] = I([](RunConfig& c) -> int& { return c.truncate.lanczos.max_basis; });
  auto& f = s["fit"];
  f["mode"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v != "kernel" && v != "synthetic")
      throw ConfigError("bad value for " + k + ": '" + v + "' (expected kernel or synthetic)");
    c.fit_mode = v;
  };
  f["eta_bound"] = D([](RunConfig& c) -> double& { return c.fit.eta_bound; });
  f["n_p"] = I([](RunConfig& c) -> int& { return c.fit.n_p; });
  f["x_bound"] = D([](RunConfig& c) -> double& { return c.fit.x_bound; });
  f["t_max"] = D([](RunConfig& c) -> double& { return c.fit.t_max; });
  f["grid_dt"] = D([](RunConfig& c) -> double& { return c.fit.grid_dt; });
  f["x0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
    std::stringstream ss(v);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= 4) throw ConfigError(k + " takes exactly 4 comma-separated values");
      c.fit.x0[i++] = to_double(k, trim(item));
    }
    if (i != 4) throw ConfigError(k + " takes exactly 4 comma-separated values");
  };
  f["ns"] = I([](RunConfig& c) -> int& { return c.fit.schedule.ns; });
  f["nt"] = I([](RunConfig& c) -> int& { return c.fit.schedule.nt; });
  f["rt"] = D([](RunConfig& c) -> double& { return c.fit.schedule.rt; });
  f["eps"] = D([](RunConfig& c) -> double& { return c.fit.schedule.eps; });
  f["neps"] = I([](RunConfig& c) -> int& { return c.fit.schedule.neps; });
  f["T0"] = D([](RunConfig& c) -> double& { return c.fit.schedule.T0; });
  f["max_temperatures"] = I([](RunConfig& c) -> int& { return c.fit.schedule.max_temperatures; });
  f["max_evals"] = I([](RunConfig& c) -> long& { return c.fit.schedule.max_evals; });
  f["synthetic_b"] = D([](RunConfig& c) -> double& { return c.synthetic_b; });
  f["synthetic_c"] = D([](RunConfig& c) -> double& { return c.synthetic_c; });
  auto& sm = s["sim"];
  sm["t_end"] = D([](RunConfig& c) -> double& { return c.sim.t_end; });
  sm["output_dt"] = D([](RunConfig& c) -> double& { return c.sim.output_dt; });
  sm["rtol"] = D([](RunConfig& c) -> double& { return c.sim.rtol; });
  sm["atol"] = D([](RunConfig& c) -> double& { return c.sim.atol; });
  auto& k = s["kernel"];
  k["source"] = [](RunConfig& c, const std::string& key, const std::string& v) {
    if (v != "fit" && v != "explicit")
      throw ConfigError("bad value for " + key + ": '" + v + "' (expected fit or explicit)");
    c.kernel.source = v;
  };
  k["beta"] = D([](RunConfig& c) -> double& { return c.kernel.beta; });
  k["mu"] = D([](RunConfig& c) -> double& { return c.kernel.mu; });
  k["nu"] = D([](RunConfig& c) -> double& { return c.kernel.nu; });
  k["gamma"] = D([](RunConfig& c) -> double& { return c.kernel.gamma; });
  k["K1_0"] = D([](RunConfig& c) -> double& { return c.kernel.K1_0; });
  k["calBbar"] = D([](RunConfig& c) -> double& { return c.kernel.calBbar; });
  k["K0_sign"] = D([](RunConfig& c) -> double& { return c.kernel.K0_sign; });
  auto& io = s["io"];
  io["out_dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; };
  io["seed"] = [](RunConfig& c, const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < 0) throw ConfigError("bad value for " + key + ": seed must be nonnegative");
    c.apply_seed(std::uint64_t(x));
  };
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const auto table = setters();
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' appears outside any section");
    const auto it = table.find(section);
    if (it == table.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      const auto kt = it->second.find(key);
      if (kt == it->second.end()) throw ConfigError("unknown key " + section + "." + key);
      kt->second(c, section + "." + key, trim(value.data()));
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  return parse_config(read_file(path));
}

void validate(const RunConfig& c) {
  try {
    validate(c.model);
    validate(c.fit);
  } catch (const NumericalError& e) {
    throw ConfigError(e.what());
  }
  if (c.n_B < 1) throw ConfigError("bath.n_B must be at least 1");
  if (!(c.sim.t_end >= 0) || !(c.sim.output_dt > 0)) throw ConfigError("sim.t_end >= 0 and sim.output_dt > 0 required");
  if (!(c.sim.rtol > 0) || !(c.sim.atol > 0)) throw ConfigError("sim tolerances must be positive");
  if (c.out_dir.empty()) throw ConfigError("io.out_dir is empty");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << contents;
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string positions_csv(const std::vector<Site>& pos) {
  std::ostringstream os;
  os << "x,y,z\n";
  for (const Site& s : pos) os << s(0) << ',' << s(1) << ',' << s(2) << '\n';
  return os.str();
}

std::string couplings_csv(const BathGeometry& g) {
  std::ostringstream os;
  os << "j,k,C_jk\n";
  const int n = int(g.positions.size());
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) os << j << ',' << k << ',' << fmt_double(g.C(j, k)) << '\n';
  os << "k,A_k\n";
  for (int k = 0; k < n; ++k) os << k << ',' << fmt_double(g.A(k)) << '\n';
  os << "C_norm," << fmt_double(g.C_norm) << "\nA_norm," << fmt_double(g.A_norm) << '\n';
  return os.str();
}

std::string bath_evals_csv(const TruncatedBath& tb) {
  std::ostringstream os;
  os << "i,energy\n";
  for (int i = 0; i < tb.n_B; ++i) os << i << ',' << fmt_double(tb.evals(i)) << '\n';
  return os.str();
}

std::string bath_matrix_csv(const TruncatedBath& tb) {
  std::ostringstream os;
  os << "i,j,re,im\n";
  for (int i = 0; i < tb.n_B; ++i)
    for (int j = 0; j < tb.n_B; ++j)
      os << i << ',' << j << ',' << fmt_double(tb.B(i, j).real()) << ',' << fmt_double(tb.B(i, j).imag())
         << '\n';
  return os.str();
}

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    std::vector<std::string> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(trim(cell));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TruncatedBath parse_truncated_bath(const std::string& evals_csv, const std::string& matrix_csv) {
  TruncatedBath tb;
  const auto er = csv_rows(evals_csv);
  tb.n_B = int(er.size());
  tb.requested_n_B = tb.n_B;
  if (tb.n_B == 0) throw std::runtime_error("bath eigenvalue file is empty");
  tb.evals.resize(tb.n_B);
  for (int i = 0; i < tb.n_B; ++i) {
    if (er[i].size() != 2 || to_int("bath index", er[i][0]) != i) throw std::runtime_error("malformed bath eigenvalue file");
    tb.evals(i) = to_double("energy", er[i][1]);
  }
  const auto mr = csv_rows(matrix_csv);
  if (mr.size() != std::size_t(tb.n_B) * tb.n_B) throw std::runtime_error("bath matrix size does not match eigenvalues");
  tb.B.resize(tb.n_B, tb.n_B);
  for (const auto& r : mr) {
    if (r.size() != 4) throw std::runtime_error("malformed bath matrix file");
    const long long i = to_int("i", r[0]), j = to_int("j", r[1]);
    if (i < 0 || j < 0 || i >= tb.n_B || j >= tb.n_B) throw std::runtime_error("bath matrix index out of range");
    tb.B(i, j) = cplx(to_double("re", r[2]), to_double("im", r[3]));
  }
  if (hermitian_defect(tb.B) > 1e-12) throw std::runtime_error("bath matrix is not Hermitian");
  return tb;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << "t";
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) os << ",rho_re_" << i + 1 << j + 1 << ",rho_im_" << i + 1 << j + 1;
  os << ",min_eigenvalue\n";
  for (std::size_t n = 0; n < tr.t.size(); ++n) {
    os << fmt_double(tr.t[n]);
    const Mat3& r = tr.rho[n];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) os << ',' << fmt_double(r(i, j).real()) << ',' << fmt_double(r(i, j).imag());
    os << ',' << fmt_double(min_eigenvalue(r)) << '\n';
  }
  return os.str();
}

std::string observables_csv(const ObservableSeries& o) {
  std::ostringstream os;
  os << "t,Sx,Sy,Sz,purity,rho11,rho22,rho33,sigma12_re,sigma12_im,sigma13_re,sigma13_im,sigma23_re,"
        "sigma23_im,min_eig\n";
  for (std::size_t n = 0; n < o.size(); ++n) {
    os << fmt_double(o.t[n]) << ',' << fmt_double(o.Sx[n]) << ',' << fmt_double(o.Sy[n]) << ','
       << fmt_double(o.Sz[n]) << ',' << fmt_double(o.purity[n]);
    for (double d : o.rho_diag[n]) os << ',' << fmt_double(d);
    for (const cplx& s : o.sigma_offdiag[n]) os << ',' << fmt_double(s.real()) << ',' << fmt_double(s.imag());
    os << ',' << fmt_double(o.min_eig[n]) << '\n';
  }
  return os.str();
}

ObservableSeries parse_observables_csv(const std::string& text) {
  ObservableSeries o;
  for (const auto& r : csv_rows(text)) {
    if (r.size() != 15) throw std::runtime_error("observables file has a row with " + std::to_string(r.size()) + " columns, expected 15");
    double v[15];
    for (int i = 0; i < 15; ++i) v[i] = to_double("observables column " + std::to_string(i), r[i]);
    o.t.push_back(v[0]);
    o.Sx.push_back(v[1]);
    o.Sy.push_back(v[2]);
    o.Sz.push_back(v[3]);
    o.purity.push_back(v[4]);
    o.rho_diag.push_back({v[5], v[6], v[7]});
    o.sigma_offdiag.push_back({cplx(v[8], v[9]), cplx(v[10], v[11]), cplx(v[12], v[13])});
    o.min_eig.push_back(v[14]);
  }
  return o;
}

std::string kernel_table_csv(const MeanFieldKernel& mf, const SMEKernel& k, double t_max, double dt) {
  std::ostringstream os;
  os << "t,K1_mf,K1_sme,K0_mf,K0_sme\n";
  const long n = std::lround(t_max / dt);
  for (long i = 0; i <= n; ++i) {
    const double t = double(i) * dt;
    os << fmt_double(t) << ',' << fmt_double(eval_K1_mf(mf, t)) << ',' << fmt_double(eval_K1_sme(k, t)) << ','
       << fmt_double(eval_K0_mf(mf, t)) << ',' << fmt_double(eval_K0_sme(k, t)) << '\n';
  }
  return os.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return kv;
}

LoadedKernel kernel_from_fit_text(const std::string& fit_txt) {
  const auto kv = parse_key_values(fit_txt);
  auto get = [&](const std::string& k) {
    const auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error("fit artifact lacks " + k);
    return to_double(k, it->second);
  };
  LoadedKernel l;
  l.kernel = make_sme_kernel(get("beta"), get("mu"), get("nu"), get("gamma"), get("K1_0"),
                             get("K0_0") < 0 ? -1 : 1);
  l.calBbar = get("calBbar");
  return l;
}

LoadedKernel kernel_from_config(const KernelConfig& k) {
  LoadedKernel l;
  l.kernel = make_sme_kernel(k.beta, k.mu, k.nu, k.gamma, k.K1_0, k.K0_sign);
  l.calBbar = k.calBbar;
  return l;
}

void update_manifest(const std::string& dir, const std::string& config_hash, std::uint64_t seed,
                     const std::vector<std::string>& files) {
  namespace fs = std::filesystem;
  const std::string path = (fs::path(dir) / "manifest.txt").string();
  std::map<std::string, std::string> entries;
  if (fs::exists(path)) {
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("file ", 0) != 0) continue;
      std::istringstream ls(line.substr(5));
      std::string name, hash;
      ls >> name >> hash;
      if (!name.empty()) entries[name] = hash;
    }
  }
  for (const std::string& f : files) entries[f] = sha256_hex(read_file((fs::path(dir) / f).string()));
  std::ostringstream os;
  os << "config_sha256 " << config_hash << "\nseed " << seed << "\n";
  for (const auto& [name, hash] : entries) os << "file " << name << ' ' << hash << '\n';
  write_file(path, os.str());
}

}  // namespace nzfit
