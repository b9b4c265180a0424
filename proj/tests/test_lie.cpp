#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "volflow/lie.hpp"

using namespace volflow;

namespace {

CMat mat2(Cplx a, Cplx b, Cplx c, Cplx d) {
  CMat m(2, 2);
  m << a, b, c, d;
  return m;
}

const Cplx I{0, 1};

}  // namespace

TEST_CASE("su basis: n=2 matches the standard h, e, f") {
  auto basis = su_basis(2);
  REQUIRE(basis.size() == 3);
  CHECK(max_abs(basis[0].mat() - mat2(0.5 * I, 0, 0, -0.5 * I)) == 0.0);
  CHECK(max_abs(basis[1].mat() - mat2(0, 0.5, -0.5, 0)) == 0.0);
  CHECK(max_abs(basis[2].mat() - mat2(0, 0.5 * I, 0.5 * I, 0)) == 0.0);
}

TEST_CASE("su basis: counts and membership") {
  for (int n : {2, 3, 4, 5}) {
    auto basis = su_basis(n);
    CHECK(static_cast<int>(basis.size()) == n * n - 1);
    for (const auto& x : basis) {
      CHECK(max_abs(x.mat() + x.mat().adjoint()) == 0.0);
      CHECK(std::abs(x.mat().trace()) == 0.0);
    }
  }
  CHECK_THROWS_AS(su_basis(1), std::invalid_argument);
}

TEST_CASE("su basis: e_{24} at n=4 sits in the right slots") {
  CMat e24 = basis_matrix({BasisKind::e, 2, 4}, 4);
  CHECK(e24(1, 3) == Cplx(0.5, 0));
  CHECK(e24(3, 1) == Cplx(-0.5, 0));
  CHECK(max_abs(e24) == 0.5);
}

TEST_CASE("borel basis: n=2 ordering and the ur/ui relations") {
  auto basis = borel_basis(2);
  REQUIRE(basis.size() == 4);
  CHECK(max_abs(basis[0].mat() - mat2(0.5 * I, 0, 0, -0.5 * I)) == 0.0);
  CHECK(max_abs(basis[1].mat() - mat2(-0.5, 0, 0, 0.5)) == 0.0);
  CHECK(max_abs(basis[2].mat() - mat2(0, 1, 0, 0)) == 0.0);
  CHECK(max_abs(basis[3].mat() - mat2(0, I, 0, 0)) == 0.0);

  CHECK(static_cast<int>(borel_basis(3).size()) == 10);
  for (int n : {2, 3, 4}) CHECK(static_cast<int>(borel_basis(n).size()) == n * n + n - 2);

  // ur_{12} = e_{12} - i f_{12}, ui_{12} = i e_{12} + f_{12}
  CMat e = basis_matrix({BasisKind::e, 1, 2}, 2), f = basis_matrix({BasisKind::f, 1, 2}, 2);
  CHECK(max_abs(basis_matrix({BasisKind::ur, 1, 2}, 2) - (e - I * f)) < 1e-15);
  CHECK(max_abs(basis_matrix({BasisKind::ui, 1, 2}, 2) - (I * e + f)) < 1e-15);
}

TEST_CASE("bracket: antisymmetry, Jacobi, and the su_2 fixture [e,f] = h") {
  SlElement e(basis_matrix({BasisKind::e, 1, 2}, 2));
  SlElement f(basis_matrix({BasisKind::f, 1, 2}, 2));
  CMat h = basis_matrix({BasisKind::h, 1}, 2);
  CHECK(max_abs(bracket(e, f).mat() - h) < 1e-15);

  SlElement x = random_sl(4, 1), y = random_sl(4, 2), z = random_sl(4, 3);
  CHECK(max_abs(bracket(x, x).mat()) == 0.0);
  CMat jac = bracket(bracket(x, y), z).mat() + bracket(bracket(y, z), x).mat() +
             bracket(bracket(z, x), y).mat();
  CHECK(max_abs(jac) < 1e-12);
  CHECK(std::abs(bracket(x, y).mat().trace()) < 1e-13);

  // bracket of su elements stays in su
  CMat b = commutator(random_su(3, 4).mat(), random_su(3, 5).mat());
  CHECK(max_abs(b + b.adjoint()) < 1e-13);

  CHECK_THROWS_AS(bracket(x, random_sl(3, 9)), std::invalid_argument);
}

TEST_CASE("split_hermitian: recombination, idempotence, ur_12 fixture") {
  SlElement x = random_sl(4, 7);
  auto sp = split_hermitian(x);
  CHECK(max_abs(sp.su_part.mat() + sp.isu_part.mat() - x.mat()) < 1e-15 * (1 + max_abs(x.mat())));
  auto again = split_hermitian(sp.su_part.sl());
  CHECK(max_abs(again.su_part.mat() - sp.su_part.mat()) == 0.0);
  CHECK(max_abs(again.isu_part.mat()) == 0.0);

  auto su_in = split_hermitian(random_su(3, 8).sl());
  CHECK(max_abs(su_in.isu_part.mat()) < 1e-15);

  auto ur = split_hermitian(SlElement(basis_matrix({BasisKind::ur, 1, 2}, 2)));
  CHECK(max_abs(ur.su_part.mat() - mat2(0, 0.5, -0.5, 0)) < 1e-15);
  CHECK(max_abs(ur.isu_part.mat() - mat2(0, 0.5, 0.5, 0)) < 1e-15);
}

TEST_CASE("split_diagonal") {
  BorelElement x(mat2(Cplx(1, 2), 0, 0, Cplx(-1, -2)));
  auto sp = split_diagonal(x);
  CHECK(sp.re_diag(0) == 1.0);
  CHECK(sp.re_diag(1) == -1.0);
  CHECK(sp.im_diag(0) == 2.0);
  CHECK(sp.im_diag(1) == -2.0);
  CHECK(max_abs(sp.unipotent.mat()) == 0.0);

  auto ur = split_diagonal(BorelElement(basis_matrix({BasisKind::ur, 1, 2}, 2)));
  CHECK(ur.re_diag.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ur.im_diag.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_abs(ur.unipotent.mat() - basis_matrix({BasisKind::ur, 1, 2}, 2)) == 0.0);

  // loxodromic normalization: diag((l + i theta)/2, -(l + i theta)/2)
  double l = 0.8, th = 0.3;
  auto lox = split_diagonal(BorelElement(mat2(Cplx(l, th) / 2.0, 0, 0, -Cplx(l, th) / 2.0)));
  CHECK(lox.re_diag(0) == doctest::Approx(l / 2).epsilon(1e-15));
  CHECK(lox.im_diag(0) == doctest::Approx(th / 2).epsilon(1e-15));
  CHECK(std::abs(lox.re_diag.sum()) < 1e-15);
  CHECK(std::abs(lox.im_diag.sum()) < 1e-15);
}

TEST_CASE("adjoint_action") {
  SlElement x = random_sl(3, 11);
  CHECK(max_abs(adjoint_action(CMat::Identity(3, 3), x).mat() - x.mat()) == 0.0);

  // SU(n) conjugation commutes with the Hermitian split
  CMat k = expm(random_su(3, 12).mat());
  auto direct = split_hermitian(adjoint_action(k, x));
  auto swapped = adjoint_action(k, split_hermitian(x).isu_part);
  CHECK(max_abs(direct.isu_part.mat() - swapped.mat()) < 1e-12);

  // diagonal unitary mixes ur into ur/ui by a phase
  double th = 0.37;
  CMat kd = mat2(std::exp(I * th), 0, 0, std::exp(-I * th));
  CMat got = adjoint_action(kd, SlElement(basis_matrix({BasisKind::ur, 1, 2}, 2))).mat();
  CMat want = std::cos(2 * th) * basis_matrix({BasisKind::ur, 1, 2}, 2) +
              std::sin(2 * th) * basis_matrix({BasisKind::ui, 1, 2}, 2);
  CHECK(max_abs(got - want) < 1e-15);

  CHECK_THROWS_AS(adjoint_action(CMat::Zero(3, 3), x), std::invalid_argument);
}

TEST_CASE("matrix_exp fixtures") {
  CHECK(max_abs(expm(CMat::Zero(3, 3)) - CMat::Identity(3, 3)) == 0.0);

  Cplx lam(0.7, 0.4);
  CMat d = expm(mat2(lam / 2.0, 0, 0, -lam / 2.0));
  CHECK(std::abs(d(0, 0) - std::exp(lam / 2.0)) < 1e-14);
  CHECK(std::abs(d(0, 1)) == 0.0);

  CMat u = expm(basis_matrix({BasisKind::ur, 1, 2}, 2));
  CHECK(max_abs(u - mat2(1, 1, 0, 1)) < 1e-15);

  // det = exp(trace) = 1 for traceless inputs of norm up to ~10
  CMat big = expm(5.0 * random_sl(4, 13).mat());
  CHECK(std::abs(big.determinant() - 1.0) < 1e-9 * std::pow(max_abs(big), 4));
}

TEST_CASE("commuting_triangularize: basic contracts") {
  // already upper triangular inputs stay upper triangular
  CMat u1 = mat2(1, 1, 0, 1), u2 = mat2(1, 3, 0, 1);
  std::array<CMat, 2> uni = {u1, u2};
  auto tri = commuting_triangularize(uni);
  CHECK(strict_lower_max(tri.uppers[0]) == 0.0);
  CHECK(strict_lower_max(tri.uppers[1]) == 0.0);
  CHECK(max_abs(tri.conjugator * tri.uppers[0] * tri.conjugator.adjoint() - u1) < 1e-12);
  CHECK(max_abs(tri.conjugator * tri.uppers[1] * tri.conjugator.adjoint() - u2) < 1e-12);

  // a commuting diagonalizable pair becomes diagonal
  for (int n : {2, 3, 4}) {
    std::mt19937_64 rng(100 + n);
    std::normal_distribution<double> g;
    CMat p(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p(i, j) = Cplx(g(rng), g(rng));
    CMat d1 = CMat::Zero(n, n), d2 = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      d1(i, i) = std::exp(Cplx(g(rng), g(rng)) * 0.4);
      d2(i, i) = std::exp(Cplx(g(rng), g(rng)) * 0.4);
    }
    d1 /= std::pow(d1.diagonal().prod(), 1.0 / n);
    d2 /= std::pow(d2.diagonal().prod(), 1.0 / n);
    CMat pinv = p.fullPivLu().inverse();
    std::array<CMat, 2> ms = {p * d1 * pinv, p * d2 * pinv};
    auto t = commuting_triangularize(ms);
    for (const auto& upper : t.uppers) {
      CMat off = upper;
      off.diagonal().setZero();
      CHECK(max_abs(off) < 1e-10);
    }
    CHECK(max_abs(t.conjugator.adjoint() * t.conjugator - CMat::Identity(n, n)) < 1e-12);
  }

  // non-commuting inputs are rejected
  std::array<CMat, 2> bad = {basis_matrix({BasisKind::ur, 1, 2}, 2) + CMat::Identity(2, 2),
                             basis_matrix({BasisKind::ur, 1, 2}, 2).adjoint() +
                                 CMat::Identity(2, 2)};
  CHECK_THROWS_AS(commuting_triangularize(bad), std::invalid_argument);
}

TEST_CASE("commuting_triangularize: repeated eigenvalues and targets") {
  CMat m1 = CMat::Zero(3, 3), m2 = CMat::Zero(3, 3);
  m1 << 1, 1, 0, 0, 1, 0, 0, 0, 1;  // unipotent
  m2 << 2, 0, 0, 0, 2, 0, 0, 0, 0.25;
  std::array<CMat, 2> ms = {m1, m2};
  auto t = commuting_triangularize(ms);
  CHECK(strict_lower_max(t.uppers[0]) == 0.0);
  CHECK(max_abs(t.conjugator * t.uppers[1] * t.conjugator.adjoint() - m2) < 1e-10);

  // target ordering is honored for distinct joint eigenvalues
  CMat d = CMat::Zero(3, 3);
  d << 2, 0, 0, 0, 0.5, 0, 0, 0, 1;
  std::array<CMat, 1> single = {d};
  std::vector<std::vector<Cplx>> want = {{Cplx(0.5, 0)}, {Cplx(1, 0)}, {Cplx(2, 0)}};
  auto ordered = commuting_triangularize(single, &want);
  CHECK(std::abs(ordered.uppers[0](0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(ordered.uppers[0](1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(ordered.uppers[0](2, 2) - 2.0) < 1e-12);
}

TEST_CASE("branch_log_upper") {
  CHECK(max_abs(branch_log_upper(CMat::Identity(2, 2)).mat()) == 0.0);

  // principal branch on a diagonal
  Cplx lam(1, 1);
  BorelElement lg = branch_log_upper(mat2(std::exp(lam), 0, 0, std::exp(-lam)));
  CHECK(std::abs(lg.mat()(0, 0) - lam) < 1e-14);
  CHECK(std::abs(lg.mat()(1, 1) + lam) < 1e-14);

  // branch continuity against a reference near the cut
  double a = 0.999 * kPi;
  CMat u = mat2(std::exp(I * a), 0, 0, std::exp(-I * a));
  BorelElement ref(mat2(I * (1.001 * kPi), 0, 0, -I * (1.001 * kPi)));
  BorelElement tracked = branch_log_upper(u, ref);
  CHECK(std::abs(tracked.mat()(0, 0) - I * a) < 1e-12);

  // a reference one sheet up pulls the log with it
  CMat u2 = mat2(std::exp(I * (1.2 * kPi)), 0, 0, std::exp(-I * (1.2 * kPi)));
  BorelElement ref2(mat2(I * (1.25 * kPi), 0, 0, -I * (1.25 * kPi)));
  BorelElement up = branch_log_upper(u2, ref2);
  CHECK(std::abs(up.mat()(0, 0) - I * (1.2 * kPi)) < 1e-12);
  CHECK(dist_to_2pi_lattice(up.mat().trace()) < 1e-12);

  // eigenvalue at the cut without a reference is ambiguous
  CMat cut = mat2(-1, 0, 0, -1);
  CHECK_THROWS_AS(branch_log_upper(cut), std::invalid_argument);

  // repeated diagonal with nilpotent part
  CMat uni = mat2(1, 5, 0, 1);
  CHECK(max_abs(branch_log_upper(uni).mat() - mat2(0, 5, 0, 0)) < 1e-12);

  // mixed clusters in non-contiguous diagonal order
  CMat m = CMat::Zero(3, 3);
  m << Cplx(2, 0), Cplx(1, 1), Cplx(0, 2), 0, Cplx(0.25, 0), Cplx(3, -1), 0, 0, Cplx(2, 0);
  BorelElement lm = branch_log_upper(m);
  CHECK(max_abs(expm(lm.mat()) - m) < 1e-9);

  CHECK_THROWS_AS(branch_log_upper(mat2(0, 0, 0, 1)), std::invalid_argument);
}

TEST_CASE("branch_log_upper inverts matrix_exp on safe elements") {
  for (int n : {2, 3, 4, 5}) {
    for (int trial = 0; trial < 25; ++trial) {
      CMat m = 0.4 * random_borel(n, 1000 + trial).mat();
      Cplx shift = m.trace() / static_cast<double>(n);
      for (int i = 0; i < n; ++i) m(i, i) -= shift;
      BorelElement x(m);
      CHECK(max_abs(branch_log_upper(expm(x.mat())).mat() - x.mat()) < 1e-9);
    }
  }
}

TEST_CASE("random elements: determinism and membership") {
  CHECK(max_abs(random_sl(3, 5).mat() - random_sl(3, 5).mat()) == 0.0);
  CHECK(max_abs(random_su(4, 5).mat() + random_su(4, 5).mat().adjoint()) < kEpsAlg);
  CHECK(strict_lower_is_zero(random_borel(4, 5).mat()));
  CHECK(max_abs(random_sl(3, 5).mat() - random_sl(3, 6).mat()) > 1e-3);
}

TEST_CASE("element invariants are enforced") {
  CHECK_THROWS_AS(SlElement(CMat::Identity(2, 2)), std::invalid_argument);
  CMat notsu = mat2(0, 1, 0, 0);
  CHECK_THROWS_AS(SuElement(std::move(notsu)), std::invalid_argument);
  CMat low = CMat::Zero(2, 2);
  low(1, 0) = 1e-14;  // tiny but nonzero lower entry is still rejected
  CHECK_THROWS_AS(BorelElement(std::move(low)), std::invalid_argument);
  // traces in 2*pi*i*Z are accepted
  CMat shifted = CMat::Zero(2, 2);
  shifted(0, 0) = Cplx(0, 2 * kPi);
  CHECK_NOTHROW(SlElement(std::move(shifted)));
  BasisIndex bad{BasisKind::e, 2, 2};
  CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);
}

TEST_CASE("h_difference is the literal difference matrix") {
  CMat h13 = h_difference(4, 1, 3);
  CHECK(h13(0, 0) == Cplx(0, 0.5));
  CHECK(h13(2, 2) == Cplx(0, -0.5));
  CHECK(std::abs(h13.trace()) == 0.0);
  CMat via_basis = basis_matrix({BasisKind::h, 1}, 4) - basis_matrix({BasisKind::h, 3}, 4);
  CHECK(max_abs(h13 - via_basis) == 0.0);
}
