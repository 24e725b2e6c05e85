// Regenerates the deterministic fixture set under fixtures/.

#include <filesystem>
#include <iostream>

#include "nlf/io.hpp"

using namespace nlf;

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const io::json& doc) {
    io::write_document(dir + "/" + name, doc);
    std::cout << dir << "/" << name << "\n";
  };

  auto bell = bell_measurement(2);
  BipartiteState phi(max_entangled(2));

  put("state_phi_plus.json", io::state_to_json(phi));
  put("state_isotropic_p050.json", io::state_to_json(isotropic_state(2, 0.5)));
  put("state_isotropic_p080.json", io::state_to_json(isotropic_state(2, 0.8)));
  put("state_isotropic_p100.json", io::state_to_json(isotropic_state(2, 1.0)));
  {
    Rng rng(8801);
    Matrix ga(2, 2), gb(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        ga(i, j) = rng.cgauss();
        gb(i, j) = rng.cgauss();
      }
    Matrix ra = ga * ga.adjoint();
    ra /= ra.trace().real();
    Matrix rb = gb * gb.adjoint();
    rb /= rb.trace().real();
    put("state_product.json",
        io::state_to_json(BipartiteState(HermitianOperator({2, 2}, kron(ra, rb)))));
  }
  put("state_separable.json", io::state_to_json(random_separable({2, 2}, 3, 8802).assemble()));

  put("povm_bell.json", io::povm_to_json(bell));

  put("measurement_bell_phi_plus.json",
      io::measurement_to_json(build_distributed(bell, bell, phi)));
  put("measurement_free.json",
      io::measurement_to_json(build_free_distributed(random_povm({2, 2}, 2, 8803),
                                                     random_povm({2, 2}, 2, 8804),
                                                     random_separable({2, 2}, 2, 8805))));

  put("instrument_ideal_teleportation.json",
      io::instrument_to_json(teleportation_instrument(bell, phi)));
  put("instrument_classical.json",
      io::instrument_to_json(teleportation_instrument(random_povm({2, 2}, 4, 8806),
                                                      random_separable({2, 2}, 2, 8807).assemble())));

  {
    std::vector<double> probs(4, 0.25);
    std::vector<HermitianOperator> states;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        Matrix m = Matrix::Zero(4, 4);
        m(x * 2 + y, x * 2 + y) = 1.0;
        states.emplace_back(std::vector<int>{2, 2}, m);
      }
    put("ensemble_orthogonal_products.json",
        io::ensemble_to_json(StateEnsemble(2, 2, probs, states)));
  }
  put("subroutine_random.json", io::subroutine_to_json(random_subroutine(4, 4, {2}, {2}, 2, 8808)));
  return 0;
}
