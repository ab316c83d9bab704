#include "bfly/oracle.hpp"

namespace bfly {

Matrix EntryOracle::submatrix(std::span<const Index> rows, std::span<const Index> cols) const {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t b = 0; b < cols.size(); ++b) {
    for (std::size_t a = 0; a < rows.size(); ++a) {
      out(static_cast<Index>(a), static_cast<Index>(b)) = entry(rows[a], cols[b]);
    }
  }
  return out;
}

DenseEntryOracle::DenseEntryOracle(Matrix k) : k_(std::move(k)) {
  if (k_.rows() != k_.cols()) throw std::invalid_argument("dense oracle must be square");
}

Matrix DenseEntryOracle::submatrix(std::span<const Index> rows,
                                   std::span<const Index> cols) const {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t b = 0; b < cols.size(); ++b) {
    for (std::size_t a = 0; a < rows.size(); ++a) {
      out(static_cast<Index>(a), static_cast<Index>(b)) = k_(rows[a], cols[b]);
    }
  }
  return out;
}

DenseOperator::DenseOperator(Matrix k) : k_(std::move(k)) {
  if (k_.rows() != k_.cols()) throw std::invalid_argument("dense operator must be square");
}

Matrix DenseOperator::apply(const Matrix& x) const {
  if (x.rows() != k_.cols()) throw std::invalid_argument("dense operator: length mismatch");
  return k_ * x;
}

Matrix DenseOperator::apply_adjoint(const Matrix& x) const {
  if (x.rows() != k_.rows()) throw std::invalid_argument("dense operator: length mismatch");
  return k_.adjoint() * x;
}

}  // namespace bfly
