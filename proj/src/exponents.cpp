#include "hlw/exponents.hpp"

namespace hlw {

bool ExponentTable::identities_hold() const {
  const std::int64_t n = dim.n;
  Rat sum_q(0);
  for (const Rat& q : q_k) sum_q = sum_q + q.reciprocal();
  if (q_dual.reciprocal() != sum_q / Rat(n)) return false;
  for (const auto& row : p_jk) {
    Rat sum_p(0);
    for (const Rat& p : row) sum_p = sum_p + p.reciprocal();
    if (p_main.reciprocal() != sum_p / Rat(n)) return false;
  }
  return true;
}

ExponentTable exponent_table(HDim dim) {
  if (dim.n < 1) throw std::invalid_argument("exponent_table: n must be >= 1");
  const std::int64_t n = dim.n;
  ExponentTable table;
  table.dim = dim;
  table.p_main = Rat(n * (2 * n + 1), n + 1);
  table.q_dual = Rat(n * (2 * n + 1), 2 * n * n - 1);
  table.q_k.reserve(n);
  for (std::int64_t k = 1; k <= n; ++k)
    table.q_k.push_back(k < n ? Rat(2 * n + 1, 2 * n) : Rat(2 * n + 1, 2 * n - 1));
  table.p_jk.assign(2 * n - 1, std::vector<Rat>());
  for (std::int64_t j = 1; j <= 2 * n - 1; ++j) {
    auto& row = table.p_jk[j - 1];
    row.reserve(n);
    for (std::int64_t k = 1; k <= n; ++k) {
      const bool vertex = (k == j) || (k == j + n) || (k == j - n);
      row.push_back(vertex ? Rat(2 * n + 1, 2) : Rat(2 * n + 1));
    }
  }
  if (!table.identities_hold())
    throw std::logic_error("exponent_table: convexity identities failed");
  return table;
}

}  // namespace hlw
