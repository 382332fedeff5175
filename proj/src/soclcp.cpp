#include "pdcontact/soclcp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "pdcontact/cones.hpp"
#include "pdcontact/matrix_market.hpp"

namespace pdcontact::verify {

namespace {

constexpr const char* kFormat = "pdcontact-soclcp";
constexpr int kFormatVersion = 1;

// Appends the entries of `a` shifted by (row0, col0), optionally scaled.
void append_block(std::vector<Triplet>& out, const SparseMatrix& a, std::size_t row0,
                  std::size_t col0, double scale = 1.0) {
  for (const Triplet& t : a.to_triplets()) {
    out.push_back({row0 + t.row, col0 + t.col, scale * t.value});
  }
}

double cone_violation(const ConeDescriptor& cone, std::span<const double> z) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cone.orthant; ++i) worst = std::max(worst, -z[i]);
  for (std::size_t j = 0; j < cone.soc_count; ++j) {
    const std::size_t o = cone.orthant + j * cone.soc_dim;
    worst = std::max(worst, soc_violation(z[o], z.subspan(o + 1, cone.soc_dim - 1)));
  }
  return worst;
}

}  // namespace

std::string ConeDescriptor::describe() const {
  return "R+^" + std::to_string(orthant) + ", (SOC^" + std::to_string(soc_dim) + ")^" +
         std::to_string(soc_count);
}

SOCLCPForm build_soclcp(const ProblemInstance& problem) {
  validate(problem);
  const auto& ct = problem.contact;
  const std::size_t d = problem.dofs();
  const std::size_t c = ct.c;
  const std::size_t m = static_cast<std::size_t>(ct.m);
  const std::size_t b = 1 + m;
  const std::size_t nx = (1 + b) * c;  // c + (1+m) c
  const std::size_t nv = d + (2 + m) * c;

  // Column offsets inside v = [du; lambda; r_n; r_t].
  const std::size_t col_lambda = d;
  const std::size_t col_rn = d + c;
  const std::size_t col_rt = d + 2 * c;

  SOCLCPForm f;
  f.d = d;
  f.c = c;
  f.m = ct.m;
  f.mu = problem.mu;
  f.cone = ConeDescriptor{c, c, b};

  f.M11 = SparseMatrix::zero(nx, nx);
  f.w1.assign(nx, 0.0);

  std::vector<Triplet> m12;
  for (std::size_t j = 0; j < c; ++j) {
    m12.push_back({j, col_rn + j, -1.0});
    m12.push_back({c + b * j, col_rn + j, -problem.mu});
    for (std::size_t a = 0; a < m; ++a) m12.push_back({c + b * j + 1 + a, col_rt + m * j + a, 1.0});
  }
  f.M12 = SparseMatrix::from_triplets(nx, nv, m12);

  std::vector<Triplet> m21;
  for (std::size_t i = 0; i < nx; ++i) m21.push_back({i, i, 1.0});
  f.M21 = SparseMatrix::from_triplets(nx + d, nx, m21);

  std::vector<Triplet> m22;
  append_block(m22, ct.Tn.transpose(), 0, 0);
  // -(I ⊗ E2) Tt^T: tangential row (j, a) lands in row c + b j + 1 + a.
  for (const Triplet& t : ct.Tt.transpose().to_triplets()) {
    const std::size_t j = t.row / m, a = t.row % m;
    m22.push_back({c + b * j + 1 + a, t.col, -t.value});
  }
  for (std::size_t j = 0; j < c; ++j) m22.push_back({c + b * j, col_lambda + j, -1.0});
  append_block(m22, problem.K, nx, 0);
  append_block(m22, ct.Tn, nx, col_rn, -1.0);
  append_block(m22, ct.Tt, nx, col_rt, -1.0);
  f.M22 = SparseMatrix::from_triplets(nx + d, nv, m22);

  f.w2.assign(nx + d, 0.0);
  for (std::size_t j = 0; j < c; ++j) f.w2[j] = -ct.g[j];
  for (std::size_t i = 0; i < d; ++i) f.w2[nx + i] = -problem.p[i];
  return f;
}

SoclcpPoint embed_solution(const ProblemInstance& problem, std::span<const double> du,
                           std::span<const double> r, std::span<const double> lambdas) {
  const auto& ct = problem.contact;
  const std::size_t d = problem.dofs();
  const std::size_t c = ct.c;
  const std::size_t m = static_cast<std::size_t>(ct.m);
  const std::size_t b = 1 + m;
  require_size(du.size(), d, "displacement increment");
  require_size(r.size(), b * c, "reaction vector");

  const Vector un = spmv_transpose(ct.Tn, du);
  const Vector ut = spmv_transpose(ct.Tt, du);
  Vector lam;
  if (lambdas.empty()) {
    lam.resize(c);
    for (std::size_t j = 0; j < c; ++j) lam[j] = tangential_norm(std::span<const double>(ut.data() + m * j, m));
  } else {
    require_size(lambdas.size(), c, "lambda certificate");
    lam.assign(lambdas.begin(), lambdas.end());
  }

  SoclcpPoint pt;
  pt.x.resize((1 + b) * c);
  pt.y.resize((1 + b) * c);
  for (std::size_t j = 0; j < c; ++j) {
    const double r_n = r[b * j];
    pt.x[j] = ct.g[j] - un[j];
    pt.y[j] = -r_n;
    pt.x[c + b * j] = lam[j];
    pt.y[c + b * j] = -problem.mu * r_n;
    for (std::size_t a = 0; a < m; ++a) {
      pt.x[c + b * j + 1 + a] = ut[m * j + a];
      pt.y[c + b * j + 1 + a] = r[b * j + 1 + a];
    }
  }

  pt.v.assign(du.begin(), du.end());
  pt.v.insert(pt.v.end(), lam.begin(), lam.end());
  for (std::size_t j = 0; j < c; ++j) pt.v.push_back(r[b * j]);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t a = 0; a < m; ++a) pt.v.push_back(r[b * j + 1 + a]);
  }
  return pt;
}

SoclcpReport verify_soclcp(const SOCLCPForm& form, const SoclcpPoint& pt, double tol) {
  const std::size_t nx = form.x_size();
  require_size(pt.x.size(), nx, "SOCLCP x");
  require_size(pt.y.size(), nx, "SOCLCP y");
  require_size(pt.v.size(), form.v_size(), "SOCLCP v");

  SoclcpReport rep;
  rep.tol = tol;
  rep.x_cone_violation = cone_violation(form.cone, pt.x);
  rep.y_cone_violation = cone_violation(form.cone, pt.y);

  const auto& k = form.cone;
  for (std::size_t i = 0; i < k.orthant; ++i) rep.complementarity += std::abs(pt.x[i] * pt.y[i]);
  for (std::size_t j = 0; j < k.soc_count; ++j) {
    double s = 0.0;
    for (std::size_t a = 0; a < k.soc_dim; ++a) {
      const std::size_t o = k.orthant + j * k.soc_dim + a;
      s += pt.x[o] * pt.y[o];
    }
    rep.complementarity += std::abs(s);
  }

  Vector e1 = spmv(form.M11, pt.x);
  const Vector m12v = spmv(form.M12, pt.v);
  for (std::size_t i = 0; i < nx; ++i) e1[i] = pt.y[i] - e1[i] - m12v[i] - form.w1[i];
  rep.first_equation = norm2(e1);

  Vector e2 = spmv(form.M21, pt.x);
  const Vector m22v = spmv(form.M22, pt.v);
  for (std::size_t i = 0; i < e2.size(); ++i) e2[i] += m22v[i] + form.w2[i];
  rep.second_equation = norm2(e2);
  return rep;
}

SoclcpReport verify_soclcp(const ProblemInstance& problem, std::span<const double> du,
                           std::span<const double> r, std::span<const double> lambdas,
                           double tol) {
  return verify_soclcp(build_soclcp(problem), embed_solution(problem, du, r, lambdas), tol);
}

void export_matrix_market(const SOCLCPForm& form, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_matrix_market(dir / "M11.mtx", form.M11);
  write_matrix_market(dir / "M12.mtx", form.M12);
  write_matrix_market(dir / "M21.mtx", form.M21);
  write_matrix_market(dir / "M22.mtx", form.M22);
  write_matrix_market_vector(dir / "w1.mtx", form.w1);
  write_matrix_market_vector(dir / "w2.mtx", form.w2);

  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kFormatVersion;
  j["d"] = form.d;
  j["c"] = form.c;
  j["m"] = form.m;
  j["mu"] = form.mu;
  j["cone"] = {{"description", form.cone.describe()},
               {"orthant", form.cone.orthant},
               {"soc_count", form.cone.soc_count},
               {"soc_dim", form.cone.soc_dim}};
  j["variables"] = {{"x", form.x_size()}, {"y", form.x_size()}, {"v", form.v_size()}};
  j["files"] = {{"M11", "M11.mtx"}, {"M12", "M12.mtx"}, {"M21", "M21.mtx"},
                {"M22", "M22.mtx"}, {"w1", "w1.mtx"},   {"w2", "w2.mtx"}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + (dir / "manifest.json").string());
}

SOCLCPForm import_matrix_market(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("cannot open " + (dir / "manifest.json").string());
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != kFormat) throw IoError("not a SOCLCP export");
    SOCLCPForm f;
    f.d = j.at("d").get<std::size_t>();
    f.c = j.at("c").get<std::size_t>();
    f.m = j.at("m").get<int>();
    f.mu = j.at("mu").get<double>();
    const auto& cone = j.at("cone");
    f.cone = ConeDescriptor{cone.at("orthant").get<std::size_t>(),
                            cone.at("soc_count").get<std::size_t>(),
                            cone.at("soc_dim").get<std::size_t>()};
    const auto& files = j.at("files");
    f.M11 = read_matrix_market(dir / files.at("M11").get<std::string>());
    f.M12 = read_matrix_market(dir / files.at("M12").get<std::string>());
    f.M21 = read_matrix_market(dir / files.at("M21").get<std::string>());
    f.M22 = read_matrix_market(dir / files.at("M22").get<std::string>());
    f.w1 = read_matrix_market_vector(dir / files.at("w1").get<std::string>());
    f.w2 = read_matrix_market_vector(dir / files.at("w2").get<std::string>());
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed SOCLCP manifest: ") + e.what());
  }
}

}  // namespace pdcontact::verify
