#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsyn {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 7;
inline constexpr std::size_t kMaxDim = std::size_t{1} << kMaxQubits;

// ‖U†U − I‖_max accepted when constructing a UnitaryMatrix.
inline constexpr double kUnitarityTolerance = 1e-10;

// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  // dim×dim zero matrix.
  explicit ComplexMatrix(std::size_t dim);

  // Throws SizeError if entries.size() != dim², ValidationError on NaN/Inf.
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t dim() const { return dim_; }

  Complex operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
  Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }

  std::span<const Complex> data() const { return entries_; }
  std::span<Complex> data() { return entries_; }

  ComplexMatrix& operator*=(Complex scale);
  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);

  bool is_finite() const;

  // Largest elementwise |a − b|. Throws SizeError on dimension mismatch.
  double max_abs_diff(const ComplexMatrix& other) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);

// result[(i·b.dim+k),(j·b.dim+l)] = a[i,j]·b[k,l]. Throws SizeError above kMaxDim.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Throws SizeError when dimensions differ.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Conjugate transpose.
ComplexMatrix dagger(const ComplexMatrix& a);

Complex trace(const ComplexMatrix& a);

// ‖A†A − I‖_max.
double unitarity_error(const ComplexMatrix& a);

// ‖A − A†‖_max.
double hermiticity_error(const ComplexMatrix& a);

// A ComplexMatrix of dimension 2^n that is unitary within kUnitarityTolerance.
class UnitaryMatrix {
 public:
  // Throws SizeError when the dimension is not a power of two in [2, kMaxDim],
  // ValidationError when the matrix is not unitary within `tolerance`.
  explicit UnitaryMatrix(ComplexMatrix m, double tolerance = kUnitarityTolerance);

  static UnitaryMatrix identity(int num_qubits);

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return matrix_.dim(); }
  int num_qubits() const { return num_qubits_; }
  Complex operator()(std::size_t row, std::size_t col) const { return matrix_(row, col); }

 private:
  ComplexMatrix matrix_;
  int num_qubits_ = 0;
};

// Tr(U†V) summed entrywise without forming the product. Throws SizeError on mismatch.
Complex hs_overlap(const UnitaryMatrix& u, const UnitaryMatrix& v);

// 1 − |Tr(U†V)| / 2^n, in [0, 1], zero iff V = e^{iφ}U.
double distance(const UnitaryMatrix& u, const UnitaryMatrix& v);

namespace detail {

// Raw kernels behind hs_overlap/distance; the circuit evaluator calls these
// directly so that its objective value is bit-identical to distance().
Complex hs_overlap(std::span<const Complex> u, std::span<const Complex> v);
double distance_from_overlap(Complex overlap, std::size_t dim);

}  // namespace detail

// exp(−i·t·H) through an eigendecomposition. Throws ValidationError if H is
// not Hermitian within 1e-10.
UnitaryMatrix matrix_exp_hermitian(const ComplexMatrix& h, double t);

// Nearest-unitary correction through a QR factorization with the diagonal of R
// made real positive. Used by generators when roundoff drifts past tolerance.
ComplexMatrix unitarize(const ComplexMatrix& m);

// { "num_qubits": n, "real": [[...]], "imag": [[...]] }
UnitaryMatrix unitary_from_json(std::string_view text);
std::string unitary_to_json(const UnitaryMatrix& u);
UnitaryMatrix read_unitary_file(const std::filesystem::path& path);
void write_unitary_file(const std::filesystem::path& path, const UnitaryMatrix& u);

}  // namespace qsyn
