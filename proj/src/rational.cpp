#include "steinmc/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace steinmc {

namespace {
__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}
}  // namespace

Rational::Rational(__int128 num, __int128 den) : num_(num), den_(den) {
  if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  __int128 g = gcd128(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  __int128 g = gcd128(den_, o.den_);
  __int128 lhs_scale = o.den_ / g;
  return Rational(num_ * lhs_scale + o.num_ * (den_ / g), den_ * lhs_scale);
}

Rational Rational::operator*(const Rational& o) const {
  // Cross-reduce before multiplying to keep magnitudes small.
  __int128 g1 = gcd128(num_, o.den_);
  __int128 g2 = gcd128(o.num_, den_);
  return Rational((num_ / g1) * (o.num_ / g2), (den_ / g2) * (o.den_ / g1));
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
  auto render = [](__int128 v) {
    if (v == 0) return std::string("0");
    bool neg = v < 0;
    if (neg) v = -v;
    std::string out;
    while (v > 0) {
      out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    return neg ? "-" + out : out;
  };
  return render(num_) + "/" + render(den_);
}

std::uint64_t binomial_u64(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (n > 64) throw std::invalid_argument("binomial_u64: n > 64 overflows");
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (unsigned i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;  // divisibility holds at each step
  }
  return static_cast<std::uint64_t>(acc);
}

Rational subset_weight_exact(unsigned n, unsigned a_size) {
  if (a_size >= n) throw std::invalid_argument("subset_weight: need |A| < n");
  __int128 den = static_cast<__int128>(binomial_u64(n, a_size)) *
                 static_cast<__int128>(n - a_size);
  return Rational(1, den);
}

double subset_weight_log(unsigned n, unsigned a_size) {
  if (a_size >= n) throw std::invalid_argument("subset_weight_log: need |A| < n");
  const double log_binom = std::lgamma(n + 1.0) - std::lgamma(a_size + 1.0) -
                           std::lgamma(n - a_size + 1.0);
  return -(log_binom + std::log(static_cast<double>(n - a_size)));
}

double subset_weight(unsigned n, unsigned a_size) {
  if (n <= 64) return subset_weight_exact(n, a_size).to_double();
  return std::exp(subset_weight_log(n, a_size));
}

}  // namespace steinmc
