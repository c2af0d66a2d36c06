#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace symflow {

using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(long num, long den = 1);
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

// Best rational with denominator <= max_den within tol of x, if any.
bool recognize_rational(double x, long max_den, double tol, Rational& out);

}  // namespace symflow
