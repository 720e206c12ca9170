#include "pctl/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pctl {

namespace fs = std::filesystem;

std::string format_real(double v) {
  // shortest text that reads back to the same double
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

SparseSym read_matrix_market(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw IoError(path.string() + ": malformed header, expected '%%MatrixMarket matrix coordinate real symmetric'");
  }
  if (lower(field) != "real") throw IoError(path.string() + ": expected field 'real', got '" + field + "'");
  if (lower(symmetry) != "symmetric") {
    throw IoError(path.string() + ": expected symmetry 'symmetric', got '" + symmetry + "'");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz)) throw IoError(path.string() + ": malformed size line");
  if (rows != cols) throw IoError(path.string() + ": matrix is not square");

  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw IoError(path.string() + ": expected " + std::to_string(nnz) + " entries");
    if (i < 1 || j < 1 || i > rows || j > rows) throw IoError(path.string() + ": index out of range");
    if (j > i) std::swap(i, j);
    t.push_back({i - 1, j - 1, v});
  }
  try {
    return SparseSym::from_lower(rows, t);
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_matrix_market(const SparseSym& m, const fs::path& path) {
  auto out = open_out(path);
  const auto lower_entries = m.lower_triplets();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.size() << ' ' << m.size() << ' ' << lower_entries.size() << '\n';
  for (const auto& t : lower_entries) out << t.row + 1 << ' ' << t.col + 1 << ' ' << format_real(t.value) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Vector read_vector(const fs::path& path) {
  auto in = open_in(path);
  Vector v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw IoError(path.string() + ": not a real number: '" + tok + "'");
    }
  }
  return v;
}

void write_vector(std::span<const double> v, const fs::path& path) {
  auto out = open_out(path);
  for (double x : v) out << format_real(x) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Manifest read_manifest(const fs::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  const fs::path dir = path.parent_path();
  auto file = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw IoError(path.string() + ": missing field '" + key + "'");
    fs::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : dir / p;
  };
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() <= 0) {
    throw IoError(path.string() + ": missing or invalid field 'n'");
  }

  Manifest out;
  auto& m = out.matrix;
  m.n = j["n"].get<std::size_t>();
  m.radiation = read_matrix_market(file("A_r"));
  m.ion = read_matrix_market(file("A_i"));
  m.electron = read_matrix_market(file("A_e"));
  m.rad_exchange = read_vector(file("d_r"));
  m.ion_exchange = read_vector(file("d_i"));
  try {
    m.check_dimensions();
  } catch (const DimensionError& e) {
    throw IoError(path.string() + ": dimension mismatch vs n: " + e.what());
  }
  for (const auto* d : {&m.rad_exchange, &m.ion_exchange}) {
    for (std::size_t k = 0; k < d->size(); ++k) {
      if ((*d)[k] > 0.0) {
        throw IoError(path.string() + ": positive coupling entry at index " + std::to_string(k + 1) + " of " +
                      (d == &m.rad_exchange ? "d_r" : "d_i"));
      }
    }
  }
  if (j.contains("meta")) out.meta = j["meta"];
  return out;
}

void write_manifest(const ThreeTMatrix& m, const fs::path& path, const nlohmann::json& meta) {
  m.check_dimensions();
  const fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = path.stem().string();
  nlohmann::json j;
  j["n"] = m.n;
  auto put = [&](const char* key, const std::string& suffix) {
    const std::string name = stem + "_" + key + suffix;
    j[key] = name;
    return dir / name;
  };
  write_matrix_market(m.radiation, put("A_r", ".mtx"));
  write_matrix_market(m.ion, put("A_i", ".mtx"));
  write_matrix_market(m.electron, put("A_e", ".mtx"));
  write_vector(m.rad_exchange, put("d_r", ".txt"));
  write_vector(m.ion_exchange, put("d_i", ".txt"));
  j["meta"] = meta;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace pctl
