#pragma once

#include <Eigen/Dense>
#include <cmath>

// Dense matrix exponential by scaling-and-squaring with Pade approximants
// (Higham, SIAM J. Matrix Anal. Appl. 26, 1179 (2005)).  Sized for the small
// generators used here (8x8 rate matrices); no balancing.

namespace hfs {

namespace detail {

inline void pade3(const Eigen::MatrixXd& a, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static const double b[] = {120., 60., 12., 1.};
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  u = a * (b[3] * a2 + b[1] * id);
  v = b[2] * a2 + b[0] * id;
}

inline void pade5(const Eigen::MatrixXd& a, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static const double b[] = {30240., 15120., 3360., 420., 30., 1.};
  const Eigen::MatrixXd a2 = a * a, a4 = a2 * a2;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[4] * a4 + b[2] * a2 + b[0] * id;
}

inline void pade7(const Eigen::MatrixXd& a, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static const double b[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  const Eigen::MatrixXd a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

inline void pade13(const Eigen::MatrixXd& a, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                             1187353796428800.,  129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,       1323241920.,
                             40840800.,          960960.,            16380.,
                             182.,               1.};
  const Eigen::MatrixXd a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
      b[2] * a2 + b[0] * id;
}

}  // namespace detail

inline Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  Eigen::MatrixXd u, v;
  int squarings = 0;

  if (norm < 1.495585217958292e-2) {
    detail::pade3(m, u, v);
  } else if (norm < 2.539398330063230e-1) {
    detail::pade5(m, u, v);
  } else if (norm < 9.504178996162932e-1) {
    detail::pade7(m, u, v);
  } else {
    const double theta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const Eigen::MatrixXd scaled = m / std::pow(2.0, squarings);
    detail::pade13(scaled, u, v);
  }

  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

}  // namespace hfs
