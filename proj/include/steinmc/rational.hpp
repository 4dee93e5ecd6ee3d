#pragma once

#include <cstdint>
#include <string>

namespace steinmc {

// Exact nonnegative rational on 128-bit integers.  Wide enough for the
// subset weights 1/(C(n,|A|)(n-|A|)) up to n = 64; callers needing larger
// n fall back to log-space doubles.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(__int128 num, __int128 den);

  static Rational from_int(std::int64_t v) { return Rational(v, 1); }

  Rational operator+(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }

  double to_double() const;
  std::string to_string() const;

  __int128 num() const { return num_; }
  __int128 den() const { return den_; }

 private:
  __int128 num_;
  __int128 den_;  // always > 0, gcd(num_, den_) == 1
};

// Binomial coefficient C(n,k); exact for n <= 64.
std::uint64_t binomial_u64(unsigned n, unsigned k);

// k_{n,A} = 1/(C(n,|A|)(n-|A|)), exact for n <= 64.
Rational subset_weight_exact(unsigned n, unsigned a_size);

// log k_{n,A}; valid for any n (lgamma-based).
double subset_weight_log(unsigned n, unsigned a_size);

// k_{n,A} as a double for any n.
double subset_weight(unsigned n, unsigned a_size);

}  // namespace steinmc
