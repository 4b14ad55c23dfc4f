#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fftlr {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;
using RankVector = std::vector<std::size_t>;

// All precondition and configuration failures surface as this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline std::size_t shape_product(const Shape& s) {
  std::size_t p = 1;
  for (auto n : s) p *= n;
  return p;
}

inline constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace fftlr
