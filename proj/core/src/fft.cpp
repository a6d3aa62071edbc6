#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <tuple>
#include <mutex>
#include <utility>
#include <vector>

#include "qdnls/errors.hpp"

namespace qdnls::detail {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  bool inplace;
};

// Planning is not thread-safe in FFTW; execution of an existing plan is.
std::mutex g_plan_mutex;

const PlanPair& plans(int dim, int n, bool inplace) {
  static std::map<std::tuple<int, int, bool>, PlanPair> cache;
  std::lock_guard lock(g_plan_mutex);
  auto key = std::make_tuple(dim, n, inplace);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::size_t total = dim == 1 ? std::size_t(n) : std::size_t(n) * n;
  auto* a = fftw_alloc_complex(total);
  auto* b = inplace ? a : fftw_alloc_complex(total);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.inplace = inplace;
  if (dim == 1) {
    p.fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
    p.bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
  } else {
    p.fwd = fftw_plan_dft_2d(n, n, a, b, FFTW_FORWARD, flags);
    p.bwd = fftw_plan_dft_2d(n, n, a, b, FFTW_BACKWARD, flags);
  }
  fftw_free(a);
  if (!inplace) fftw_free(b);
  if (!p.fwd || !p.bwd) throw Error("FFTW planning failed");
  return cache.emplace(key, p).first->second;
}

void check(int dim, int n, std::size_t in, std::size_t out) {
  const std::size_t total = dim == 1 ? std::size_t(n) : std::size_t(n) * n;
  if (in != total || out != total) throw InvalidArgument("fft: buffer length mismatch");
}

fftw_complex* as_fftw(const std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}

}  // namespace

void fft_forward(int dim, int n, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out) {
  check(dim, n, in.size(), out.size());
  const bool inplace = in.data() == out.data();
  fftw_execute_dft(plans(dim, n, inplace).fwd, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& z : out) z *= scale;
}

void fft_backward(int dim, int n, std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) {
  check(dim, n, in.size(), out.size());
  const bool inplace = in.data() == out.data();
  fftw_execute_dft(plans(dim, n, inplace).bwd, as_fftw(in.data()), as_fftw(out.data()));
}

}  // namespace qdnls::detail
