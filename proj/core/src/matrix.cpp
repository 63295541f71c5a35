#include "qsyn/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qsyn/error.hpp"

namespace qsyn {

namespace {

using EigenMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw SizeError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                    " vs " + std::to_string(b.dim()) + ")");
  }
}

EigenMatrix to_eigen(const ComplexMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  EigenMatrix out(n, n);
  std::copy(m.data().begin(), m.data().end(), out.data());
  return out;
}

ComplexMatrix from_eigen(const EigenMatrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<Complex> entries(m.data(), m.data() + n * n);
  return ComplexMatrix(n, std::move(entries));
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) {
    throw SizeError("ComplexMatrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                    std::to_string(entries_.size()));
  }
  if (!is_finite()) throw ValidationError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t n = rows.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw SizeError("ComplexMatrix::from_rows: matrix is not square");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(n, std::move(entries));
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& e : entries_) e *= scale;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator+=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator-=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

bool ComplexMatrix::is_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
  require_same_dim(*this, other, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
  }
  return worst;
}

ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim() * b.dim();
  if (n > kMaxDim) {
    throw SizeError("kron: result dimension " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxDim));
  }
  ComplexMatrix out(n);
  const std::size_t bd = b.dim();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < bd; ++k) {
        for (std::size_t l = 0; l < bd; ++l) out(i * bd + k, j * bd + l) = aij * b(k, l);
      }
    }
  }
  return out;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "matmul");
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = std::conj(a(j, i));
  }
  return out;
}

Complex trace(const ComplexMatrix& a) {
  Complex t{};
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double unitarity_error(const ComplexMatrix& a) {
  ComplexMatrix p = matmul(dagger(a), a);
  return p.max_abs_diff(ComplexMatrix::identity(a.dim()));
}

double hermiticity_error(const ComplexMatrix& a) { return a.max_abs_diff(dagger(a)); }

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m, double tolerance) : matrix_(std::move(m)) {
  const std::size_t d = matrix_.dim();
  if (d < 2 || d > kMaxDim || (d & (d - 1)) != 0) {
    throw SizeError("UnitaryMatrix: dimension " + std::to_string(d) +
                    " is not a power of two in [2, " + std::to_string(kMaxDim) + "]");
  }
  num_qubits_ = std::countr_zero(d);
  if (!matrix_.is_finite()) throw ValidationError("UnitaryMatrix: non-finite entry");
  const double err = unitarity_error(matrix_);
  if (!(err <= tolerance)) {
    std::ostringstream msg;
    msg << "UnitaryMatrix: ||U^dagger U - I||_max = " << err << " exceeds " << tolerance;
    throw ValidationError(msg.str());
  }
}

UnitaryMatrix UnitaryMatrix::identity(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw SizeError("UnitaryMatrix::identity: qubit count out of range");
  }
  return UnitaryMatrix(ComplexMatrix::identity(std::size_t{1} << num_qubits));
}

namespace detail {

Complex hs_overlap(std::span<const Complex> u, std::span<const Complex> v) {
  // Tr(U†V) = Σ_{i,j} conj(U[j,i])·V[j,i], i.e. the entrywise inner product.
  Complex acc{};
  for (std::size_t k = 0; k < u.size(); ++k) acc += std::conj(u[k]) * v[k];
  return acc;
}

double distance_from_overlap(Complex overlap, std::size_t dim) {
  const double d = 1.0 - std::abs(overlap) / static_cast<double>(dim);
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace detail

Complex hs_overlap(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  require_same_dim(u.matrix(), v.matrix(), "hs_overlap");
  return detail::hs_overlap(u.matrix().data(), v.matrix().data());
}

double distance(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  require_same_dim(u.matrix(), v.matrix(), "distance");
  return detail::distance_from_overlap(detail::hs_overlap(u.matrix().data(), v.matrix().data()),
                                       u.dim());
}

UnitaryMatrix matrix_exp_hermitian(const ComplexMatrix& h, double t) {
  if (!h.is_finite()) throw ValidationError("matrix_exp_hermitian: non-finite entry");
  if (hermiticity_error(h) > 1e-10) {
    throw ValidationError("matrix_exp_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<EigenMatrix> solver(to_eigen(h));
  if (solver.info() != Eigen::Success) {
    throw ValidationError("matrix_exp_hermitian: eigendecomposition failed");
  }
  const EigenMatrix& vecs = solver.eigenvectors();
  const auto& vals = solver.eigenvalues();
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> phases(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    phases(k) = std::polar(1.0, -t * vals(k));
  }
  EigenMatrix result = vecs * phases.asDiagonal() * vecs.adjoint();
  ComplexMatrix out = from_eigen(result);
  if (unitarity_error(out) > kUnitarityTolerance) out = unitarize(out);
  return UnitaryMatrix(std::move(out));
}

ComplexMatrix unitarize(const ComplexMatrix& m) {
  Eigen::HouseholderQR<EigenMatrix> qr(to_eigen(m));
  EigenMatrix q = qr.householderQ();
  const EigenMatrix& r = qr.matrixQR();
  // Absorb the phases of diag(R) into Q so that Q → M as M → unitary.
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex rkk = r(k, k);
    const double mag = std::abs(rkk);
    if (mag > 0.0) q.col(k) *= rkk / mag;
  }
  return from_eigen(q);
}

UnitaryMatrix unitary_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("unitary JSON: ") + e.what());
  }
  try {
    const int n = doc.at("num_qubits").get<int>();
    if (n < 1 || n > kMaxQubits) throw SizeError("unitary JSON: num_qubits out of range");
    const std::size_t dim = std::size_t{1} << n;
    const auto& re = doc.at("real");
    const auto& im = doc.at("imag");
    if (re.size() != dim || im.size() != dim) {
      throw SizeError("unitary JSON: expected " + std::to_string(dim) + " rows");
    }
    std::vector<Complex> entries;
    entries.reserve(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (re[i].size() != dim || im[i].size() != dim) {
        throw SizeError("unitary JSON: row " + std::to_string(i) + " has wrong length");
      }
      for (std::size_t j = 0; j < dim; ++j) {
        entries.emplace_back(re[i][j].get<double>(), im[i][j].get<double>());
      }
    }
    return UnitaryMatrix(ComplexMatrix(dim, std::move(entries)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("unitary JSON: ") + e.what());
  }
}

std::string unitary_to_json(const UnitaryMatrix& u) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (std::size_t i = 0; i < u.dim(); ++i) {
    nlohmann::json rrow = nlohmann::json::array();
    nlohmann::json irow = nlohmann::json::array();
    for (std::size_t j = 0; j < u.dim(); ++j) {
      rrow.push_back(u(i, j).real());
      irow.push_back(u(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  nlohmann::json doc{{"num_qubits", u.num_qubits()}, {"real", re}, {"imag", im}};
  return doc.dump();
}

UnitaryMatrix read_unitary_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open unitary file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return unitary_from_json(buf.str());
}

void write_unitary_file(const std::filesystem::path& path, const UnitaryMatrix& u) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write unitary file " + path.string());
  out << unitary_to_json(u) << '\n';
}

}  // namespace qsyn
