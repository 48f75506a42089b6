#pragma once

#include <cstdlib>
#include <fstream>
#include <string>

#include <dlfcn.h>

#include "gda/common.hpp"

// Thin loader around the two BLAS routines the library uses. OpenBLAS picks
// its compute kernel from OPENBLAS_CORETYPE when the shared object is first
// loaded, so the library is dlopen'ed lazily after that variable is set; a
// link-time dependency would initialize before main() and lock in whatever
// kernel the (sometimes wrong) CPU autodetection chose.

namespace gda::blas {

enum Order { RowMajor = 101 };
enum Transpose { NoTrans = 111, Trans = 112 };
enum Uplo { Upper = 121, Lower = 122 };

using dgemm_fn = void (*)(int order, int trans_a, int trans_b, int m, int n,
                          int k, double alpha, const double* a, int lda,
                          const double* b, int ldb, double beta, double* c,
                          int ldc);
using dsyrk_fn = void (*)(int order, int uplo, int trans, int n, int k,
                          double alpha, const double* a, int lda, double beta,
                          double* c, int ldc);

struct Api {
  dgemm_fn dgemm = nullptr;
  dsyrk_fn dsyrk = nullptr;
};

namespace detail {

inline bool cpu_has_avx512f() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("flags", 0) == 0 && line.find(" avx512f") != std::string::npos)
      return true;
  }
  return false;
}

inline Api load() {
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr && cpu_has_avx512f()) {
    ::setenv("OPENBLAS_CORETYPE", "SKYLAKEX", 0);
  }
  void* handle = ::dlopen("libopenblas.so.0", RTLD_NOW | RTLD_LOCAL);
  if (handle == nullptr) handle = ::dlopen("libopenblas.so", RTLD_NOW | RTLD_LOCAL);
  if (handle == nullptr) {
    throw IoError("failed to load libopenblas (required for matrix products)");
  }
  Api api;
  api.dgemm = reinterpret_cast<dgemm_fn>(::dlsym(handle, "cblas_dgemm"));
  api.dsyrk = reinterpret_cast<dsyrk_fn>(::dlsym(handle, "cblas_dsyrk"));
  if (api.dgemm == nullptr || api.dsyrk == nullptr) {
    throw IoError("libopenblas is missing cblas_dgemm/cblas_dsyrk symbols");
  }
  return api;
}

}  // namespace detail

inline const Api& api() {
  static const Api instance = detail::load();
  return instance;
}

}  // namespace gda::blas
