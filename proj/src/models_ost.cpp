#include "gptlab/models.hpp"

#include "gptlab/config.hpp"
#include "gptlab/matrix.hpp"

namespace gptlab {

using qmat::Mat;

CoeffTensor ost_phi(int mu, int m) {
  const int mm = ((m % 8) + 8) % 8;
  const Mat u = qmat::kron(qmat::rotation(-mm) * qmat::pauli(mu), qmat::pauli(0));
  return qmat::pauli_coeffs(qmat::conjugate(u, qmat::phi_plus()), Side::State);
}

OstModel build_ost(double r) {
  if (!(r > 0.0)) throw InputError("build_ost: r must be positive");
  OstModel out;
  out.r = r;
  const KindPtr& kind = pauli_qubit_kind();
  const Mat R = qmat::rotation(1);

  const double bloch[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                              {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (const auto& v : bloch) {
    // equatorial components stretched by r, the z axis untouched
    const Mat w = 0.5 * (qmat::pauli(0) + r * v[0] * qmat::pauli(1) +
                         r * v[1] * qmat::pauli(2) + v[2] * qmat::pauli(3));
    out.omega.push_back(qmat::pauli_coeffs(w, Side::State));
    out.omega_rotated.push_back(
        qmat::pauli_coeffs(qmat::conjugate(R, w), Side::Effect));
  }
  for (int mu = 0; mu < 4; ++mu)
    for (int m = 1; m < 8; m += 2) out.phi.push_back(ost_phi(mu, m));

  std::vector<CoeffTensor> d2, p2;
  std::vector<Provenance> d2_tags, p2_tags;
  for (const auto& a : out.omega)
    for (const auto& b : out.omega) {
      d2.push_back(tensor_product(a, b));
      d2_tags.push_back(Provenance::Product);
    }
  for (const auto& a : out.omega_rotated)
    for (const auto& b : out.omega_rotated) {
      p2.push_back(tensor_product(a, b));
      p2_tags.push_back(Provenance::Product);
    }
  for (const auto& f : out.phi) {
    d2.push_back(f);
    d2_tags.push_back(Provenance::Entangled);
    p2.push_back(f.with_side(Side::Effect));
    p2_tags.push_back(Provenance::Entangled);
  }

  std::vector<CoeffTensor> effect_space;
  effect_space.push_back(CoeffTensor::zeros(kind, 1, Side::Effect));
  effect_space.push_back(CoeffTensor::unit(kind, 1));
  for (const auto& e : out.omega_rotated) effect_space.push_back(e);

  const std::string name = "ost(r=" + std::to_string(r) + ")";
  out.spec = make_theory(
      name, ConeGenerators(kind, 2, Side::Effect, "P", std::move(p2), std::move(p2_tags)),
      ConeGenerators(kind, 2, Side::State, "D", std::move(d2), std::move(d2_tags)),
      std::move(effect_space));

  Strategy& s = out.strategy;
  s.link_state = ost_phi(0, 1);
  for (int mu = 0; mu < 4; ++mu) {
    s.measurement.push_back(ost_phi(mu, 1).with_side(Side::Effect));
    // conjugation by sigma_mu on the first qubit, as a coefficient map
    std::vector<double> map(16, 0.0);
    for (int nu = 0; nu < 4; ++nu) {
      const auto c = qmat::pauli_coeffs(
          qmat::conjugate(qmat::pauli(mu), qmat::pauli(nu)), Side::State);
      for (int k = 0; k < 4; ++k) map[static_cast<std::size_t>(k * 4 + nu)] = c[static_cast<std::size_t>(k)];
    }
    s.corrections.push_back(std::move(map));
  }
  const CoeffTensor unit = CoeffTensor::unit(kind, 1);
  // correlators of the rotated x+ and y+ effects: r R sigma_1 R^dagger and
  // r R sigma_2 R^dagger
  s.setting.A0 = 2.0 * out.omega_rotated[0] - unit;
  s.setting.A1 = 2.0 * out.omega_rotated[2] - unit;
  s.setting.B0 = s.setting.A0;
  s.setting.B1 = s.setting.A1;
  std::vector<std::vector<int>> law(4, std::vector<int>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) law[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = a ^ b;
  s.group_law = std::move(law);
  return out;
}

}  // namespace gptlab
