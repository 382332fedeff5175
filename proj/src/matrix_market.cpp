#include "pdcontact/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace pdcontact {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// strtod rather than stod: subnormals must parse, not raise ERANGE.
bool parse_real(const std::string& token, double& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

struct Banner {
  std::string object, format, field, symmetry;
};

Banner read_banner(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix market: empty stream");
  std::istringstream ss(line);
  Banner b;
  std::string tag;
  ss >> tag >> b.object >> b.format >> b.field >> b.symmetry;
  if (tag != "%%MatrixMarket") throw IoError("matrix market: missing %%MatrixMarket banner");
  b.object = lower(b.object);
  b.format = lower(b.format);
  b.field = lower(b.field);
  b.symmetry = lower(b.symmetry);
  if (b.object != "matrix") throw IoError("matrix market: unsupported object '" + b.object + "'");
  return b;
}

// Next line that is neither a comment nor blank.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    return true;
  }
  return false;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (const auto& t : a.to_triplets()) {
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << format_real(t.value) << '\n';
  }
  if (!out) throw IoError("matrix market: write failed");
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
  auto out = open_out(path);
  write_matrix_market(out, a);
}

SparseMatrix read_matrix_market(std::istream& in) {
  const Banner b = read_banner(in);
  if (b.format != "coordinate") throw IoError("matrix market: expected coordinate format");
  const bool pattern = b.field == "pattern";
  if (!pattern && b.field != "real" && b.field != "integer" && b.field != "double") {
    throw IoError("matrix market: unsupported field '" + b.field + "'");
  }
  const bool symmetric = b.symmetry == "symmetric";
  if (!symmetric && b.symmetry != "general") {
    throw IoError("matrix market: unsupported symmetry '" + b.symmetry + "'");
  }

  std::string line;
  if (!next_data_line(in, line)) throw IoError("matrix market: missing size line");
  std::size_t nrows = 0, ncols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nrows >> ncols >> nnz)) throw IoError("matrix market: malformed size line");
  }
  std::vector<Triplet> entries;
  entries.reserve(symmetric ? 2 * nnz : nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!next_data_line(in, line)) throw IoError("matrix market: truncated entry list");
    std::istringstream ss(line);
    std::size_t i = 0, j = 0;
    double v = 1.0;
    if (!(ss >> i >> j)) throw IoError("matrix market: malformed entry");
    if (!pattern) {
      std::string token;
      if (!(ss >> token)) throw IoError("matrix market: missing value");
      if (!parse_real(token, v)) throw IoError("matrix market: bad value '" + token + "'");
    }
    if (i == 0 || j == 0 || i > nrows || j > ncols) {
      throw IoError("matrix market: index out of range");
    }
    entries.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
  }
  try {
    return SparseMatrix::from_triplets(nrows, ncols, entries);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("matrix market: ") + e.what());
  }
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market_vector(const std::filesystem::path& path, std::span<const double> v) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (double x : v) out << format_real(x) << '\n';
  if (!out) throw IoError("matrix market: write failed");
}

Vector read_matrix_market_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Banner b = read_banner(in);
  if (b.format != "array") throw IoError("matrix market: expected array format");
  std::string line;
  if (!next_data_line(in, line)) throw IoError("matrix market: missing size line");
  std::size_t n = 0, m = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> m) || m != 1) throw IoError("matrix market: expected an n x 1 array");
  }
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_data_line(in, line)) throw IoError("matrix market: truncated array");
    const auto first = line.find_first_not_of(" \t");
    if (!parse_real(line.substr(first), v[i])) {
      throw IoError("matrix market: bad value '" + line + "'");
    }
  }
  return v;
}

}  // namespace pdcontact
