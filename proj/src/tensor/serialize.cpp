#include "fftlr/tensor/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fftlr {

namespace {

constexpr char kMagic[8] = {'F', 'F', 'T', 'L', 'R', 'T', '0', '1'};

template <class U> void put(std::ostream& os, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <class U> U get(std::istream& is) {
  unsigned char b[sizeof(U)];
  is.read(reinterpret_cast<char*>(b), sizeof(U));
  require(static_cast<bool>(is), "tensor container: truncated input");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

void put_double(std::ostream& os, double x) { put<std::uint64_t>(os, std::bit_cast<std::uint64_t>(x)); }
double get_double(std::istream& is) { return std::bit_cast<double>(get<std::uint64_t>(is)); }

void put_cplx(std::ostream& os, cplx z) {
  put_double(os, z.real());
  put_double(os, z.imag());
}
cplx get_cplx(std::istream& is) {
  const double re = get_double(is);
  return {re, get_double(is)};
}

void put_matrix(std::ostream& os, const DenseMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) put_cplx(os, m.data()[i]);
}
DenseMatrix get_matrix(std::istream& is, std::size_t rows, std::size_t cols) {
  DenseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = get_cplx(is);
  return m;
}

void put_header(std::ostream& os, Format f, const Shape& shape, const RankVector& ranks) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(shape.size()));
  for (auto n : shape) put<std::uint64_t>(os, n);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ranks.size()));
  for (auto r : ranks) put<std::uint64_t>(os, r);
}

}  // namespace

void write_tensor(std::ostream& os, const AnyTensor& any) {
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        put_header(os, FormatOf<T>::value, shape_of(t), rank_vector(t));
        if constexpr (std::is_same_v<T, FullTensor>) {
          for (auto z : t.data()) put_cplx(os, z);
        } else if constexpr (std::is_same_v<T, CpTensor>) {
          for (double w : t.weights()) put_double(os, w);
          for (const auto& f : t.factors()) put_matrix(os, f);
        } else if constexpr (std::is_same_v<T, TuckerTensor>) {
          for (bool b : t.orthonormal()) os.put(b ? 1 : 0);
          for (auto z : t.core().data()) put_cplx(os, z);
          for (const auto& f : t.factors()) put_matrix(os, f);
        } else {
          for (const auto& g : t.carriages()) put_matrix(os, g.data);
        }
      },
      any);
  require(static_cast<bool>(os), "tensor container: write failed");
}

AnyTensor read_tensor(std::istream& is) {
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  require(is && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, "tensor container: bad magic");
  const auto tag = get<std::uint32_t>(is);
  require(tag <= static_cast<std::uint32_t>(Format::tt), "tensor container: unknown format tag");
  const auto order = get<std::uint32_t>(is);
  require(order >= 1 && order <= 16, "tensor container: implausible order");
  Shape shape(order);
  for (auto& n : shape) n = get<std::uint64_t>(is);
  RankVector ranks(get<std::uint32_t>(is));
  for (auto& r : ranks) r = get<std::uint64_t>(is);
  switch (static_cast<Format>(tag)) {
    case Format::full: {
      require(shape_product(shape) <= dense_entry_cap(), "tensor container: dense size above configured cap");
      FullTensor t(shape);
      for (auto& z : t.values()) z = get_cplx(is);
      return t;
    }
    case Format::cp: {
      require(ranks.size() == 1, "tensor container: cp rank vector");
      std::vector<double> w(ranks[0]);
      for (auto& x : w) x = get_double(is);
      std::vector<DenseMatrix> f;
      for (auto n : shape) f.push_back(get_matrix(is, n, ranks[0]));
      return CpTensor(std::move(w), std::move(f));
    }
    case Format::tucker: {
      require(ranks.size() == order, "tensor container: tucker rank vector");
      std::vector<bool> flags(order);
      for (std::size_t j = 0; j < order; ++j) flags[j] = is.get() != 0;
      FullTensor core(ranks);
      for (auto& z : core.values()) z = get_cplx(is);
      std::vector<DenseMatrix> f;
      for (std::size_t j = 0; j < order; ++j) f.push_back(get_matrix(is, shape[j], ranks[j]));
      return TuckerTensor(std::move(core), std::move(f), std::move(flags));
    }
    case Format::tt: {
      require(ranks.size() + 1 == order, "tensor container: tt rank vector");
      std::vector<Carriage> g;
      for (std::size_t j = 0; j < order; ++j) {
        const std::size_t r0 = j == 0 ? 1 : ranks[j - 1];
        const std::size_t r1 = j + 1 == order ? 1 : ranks[j];
        Carriage c(r0, shape[j], r1);
        c.data = get_matrix(is, r0 * shape[j], r1);
        g.push_back(std::move(c));
      }
      return TtTensor(std::move(g));
    }
  }
  throw Error("tensor container: unreachable");
}

void save_tensor(const std::filesystem::path& path, const AnyTensor& t) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot open " + path.string() + " for writing");
  write_tensor(os, t);
}

AnyTensor load_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), "cannot open " + path.string());
  return read_tensor(is);
}

}  // namespace fftlr
