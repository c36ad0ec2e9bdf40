#include "substable/omega.hpp"

#include <complex>
#include <stdexcept>

#include "substable/char_fn.hpp"

namespace substable {

OmegaMatrix omega(const StableParams& params, const EcfGrid& grid) {
  if (params.p() != grid.p) {
    throw std::invalid_argument("omega: parameter dimension does not match grid");
  }
  const int m = grid.m();
  std::vector<std::complex<double>> phi(m);
  for (int c = 0; c < m; ++c) {
    phi[c] = cf_theoretical(params, grid.columns.col(c));
  }

  OmegaMatrix out;
  out.m = m;
  out.full.resize(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const std::complex<double> sum =
          cf_theoretical(params, grid.columns.col(j) + grid.columns.col(k));
      const std::complex<double> diff =
          cf_theoretical(params, grid.columns.col(k) - grid.columns.col(j));
      const double re_re = 0.5 * sum.real() + 0.5 * diff.real() -
                           phi[j].real() * phi[k].real();
      const double im_im = -0.5 * sum.real() + 0.5 * diff.real() -
                           phi[j].imag() * phi[k].imag();
      const double re_im = 0.5 * sum.imag() + 0.5 * diff.imag() -
                           phi[j].real() * phi[k].imag();
      out.full(j, k) = re_re;
      out.full(m + j, m + k) = im_im;
      out.full(j, m + k) = re_im;
      out.full(m + k, j) = re_im;
    }
  }
  // Exact symmetry for the eigenvalue check; the formulas are symmetric up
  // to round-off.
  out.full = ((out.full + out.full.transpose()) / 2.0).eval();
  return out;
}

}  // namespace substable
