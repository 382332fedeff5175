#include "pdcontact/problem_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pdcontact::io {

using nlohmann::json;

namespace {

constexpr const char* kProblemFormat = "pdcontact-problem";
constexpr const char* kSolutionFormat = "pdcontact-solution";
constexpr int kVersion = 1;

json matrix_to_json(const SparseMatrix& a) {
  std::vector<std::size_t> rows, cols;
  std::vector<double> vals;
  for (const Triplet& t : a.to_triplets()) {
    rows.push_back(t.row);
    cols.push_back(t.col);
    vals.push_back(t.value);
  }
  return json{{"rows", a.rows()}, {"cols", a.cols()}, {"row", rows}, {"col", cols}, {"val", vals}};
}

SparseMatrix matrix_from_json(const json& j, const char* name) {
  const auto rows = j.at("row").get<std::vector<std::size_t>>();
  const auto cols = j.at("col").get<std::vector<std::size_t>>();
  const auto vals = j.at("val").get<std::vector<double>>();
  if (rows.size() != cols.size() || rows.size() != vals.size()) {
    throw IoError(std::string("matrix ") + name + ": triplet arrays differ in length");
  }
  std::vector<Triplet> t(rows.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = {rows[i], cols[i], vals[i]};
  try {
    return SparseMatrix::from_triplets(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), t);
  } catch (const std::exception& e) {
    throw IoError(std::string("matrix ") + name + ": " + e.what());
  }
}

json problem_document(const ProblemInstance& pr) {
  const auto& in = pr.info;
  json j;
  j["format"] = kProblemFormat;
  j["version"] = kVersion;
  j["d"] = pr.dofs();
  j["c"] = pr.contact.c;
  j["m"] = pr.contact.m;
  j["mu"] = pr.mu;
  j["g"] = pr.contact.g;
  j["p"] = pr.p;
  j["K"] = matrix_to_json(pr.K);
  j["Tn"] = matrix_to_json(pr.contact.Tn);
  j["Tt"] = matrix_to_json(pr.contact.Tt);
  j["info"] = {{"kind", in.kind},       {"n_x", in.n_x},         {"n_y", in.n_y},
               {"n_z", in.n_z},         {"young", in.young},     {"poisson", in.poisson},
               {"traction", in.traction}, {"gap", in.gap},       {"bc", in.bc},
               {"extent", {in.extent_x, in.extent_y, in.extent_z}}};
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

void check_format(const json& j, const char* expected) {
  if (!j.is_object() || j.value("format", std::string()) != expected) {
    throw IoError(std::string("not a ") + expected + " document");
  }
  if (j.value("version", 0) != kVersion) throw IoError(std::string("unsupported ") + expected + " version");
}

// Non-finite values become JSON null; keep them visible instead.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string problem_to_json(const ProblemInstance& problem) {
  return problem_document(problem).dump() + "\n";
}

ProblemInstance problem_from_json(const std::string& text) {
  const json j = parse(text, "problem file");
  check_format(j, kProblemFormat);
  ProblemInstance pr;
  try {
    pr.mu = j.at("mu").get<double>();
    pr.p = j.at("p").get<Vector>();
    pr.K = matrix_from_json(j.at("K"), "K");
    pr.contact.m = j.at("m").get<int>();
    pr.contact.c = j.at("c").get<std::size_t>();
    pr.contact.g = j.at("g").get<Vector>();
    pr.contact.Tn = matrix_from_json(j.at("Tn"), "Tn");
    pr.contact.Tt = matrix_from_json(j.at("Tt"), "Tt");
    if (j.at("d").get<std::size_t>() != pr.K.rows()) throw IoError("d does not match K");
    if (j.contains("info")) {
      const json& in = j.at("info");
      auto& info = pr.info;
      info.kind = in.value("kind", info.kind);
      info.n_x = in.value("n_x", 0);
      info.n_y = in.value("n_y", 0);
      info.n_z = in.value("n_z", 0);
      info.young = in.value("young", info.young);
      info.poisson = in.value("poisson", info.poisson);
      info.traction = in.value("traction", 0.0);
      info.gap = in.value("gap", 0.0);
      info.bc = in.value("bc", info.bc);
      if (in.contains("extent")) {
        const auto e = in.at("extent").get<std::vector<double>>();
        if (e.size() != 3) throw IoError("info.extent must have 3 entries");
        info.extent_x = e[0];
        info.extent_y = e[1];
        info.extent_z = e[2];
      }
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("problem file: ") + e.what());
  }
  try {
    validate(pr);
  } catch (const std::exception& e) {
    throw IoError(std::string("problem file: ") + e.what());
  }
  return pr;
}

void write_problem(const std::filesystem::path& path, const ProblemInstance& problem) {
  write_file(path, problem_to_json(problem));
}

ProblemInstance read_problem(const std::filesystem::path& path) {
  return problem_from_json(read_file(path));
}

std::string problem_hash(const ProblemInstance& problem) {
  const std::string doc = problem_document(problem).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string solution_to_json(const solver::Solution& sol, const verify::ResidualReport& report) {
  json states = json::array();
  for (auto s : report.states) states.push_back(verify::to_string(s));
  json j;
  j["format"] = kSolutionFormat;
  j["version"] = kVersion;
  j["status"] = solver::to_string(sol.status);
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["pcg_failures"] = sol.pcg_failures;
  j["message"] = sol.message;
  j["spectral"] = {{"sigma_T", sol.spectral.sigma_T}, {"mu_pi", sol.spectral.mu_pi}};
  j["report"] = {{"resid_eq", number_or_null(report.resid_eq)},
                 {"resid_compl", number_or_null(report.resid_compl)},
                 {"resid_pen", number_or_null(report.resid_pen)},
                 {"cone_violation", number_or_null(report.cone_violation)},
                 {"fractions",
                  {{"free", report.fractions.free},
                   {"slip", report.fractions.slip},
                   {"stick", report.fractions.stick}}},
                 {"states", states}};
  j["du"] = sol.du;
  j["r"] = sol.r;
  return j.dump() + "\n";
}

void write_solution(const std::filesystem::path& path, const solver::Solution& sol,
                    const verify::ResidualReport& report) {
  write_file(path, solution_to_json(sol, report));
}

SolutionRecord read_solution(const std::filesystem::path& path) {
  const json j = parse(read_file(path), "solution file");
  check_format(j, kSolutionFormat);
  SolutionRecord rec;
  try {
    rec.du = j.at("du").get<Vector>();
    rec.r = j.at("r").get<Vector>();
    rec.status = j.value("status", rec.status);
    rec.iterations = j.value("iterations", std::size_t{0});
  } catch (const json::exception& e) {
    throw IoError(std::string("solution file: ") + e.what());
  }
  return rec;
}

void write_history_csv(std::ostream& out, const std::vector<solver::IterationRecord>& history) {
  out << "k,step_norm,alpha,beta,theta,pcg_iters,resid_eq,resid_compl,resid_pen\n";
  char buf[64];
  auto cell = [&](double v) {
    if (std::isnan(v)) return std::string();
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& h : history) {
    out << h.k << ',' << cell(h.step_norm) << ',' << cell(h.alpha) << ',' << cell(h.beta) << ','
        << cell(h.theta) << ',' << h.pcg_iters << ',' << cell(h.resid_eq) << ','
        << cell(h.resid_compl) << ',' << cell(h.resid_pen) << '\n';
  }
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<solver::IterationRecord>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_history_csv(out, history);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pdcontact::io
