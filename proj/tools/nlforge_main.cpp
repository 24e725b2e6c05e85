// nlforge: robustness quantifiers of Buscemi nonlocality, nonclassical
// teleportation, and entanglement, with discrimination-game extraction and
// numerical verification suites.
//
// Exit codes: 0 success, 1 computational/assertion failure, 2 input error.

#include <iostream>

#include "CLI11.hpp"
#include "nlf/io.hpp"
#include "nlf/verify.hpp"

namespace {

using nlf::io::json;

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty())
    std::cout << nlf::io::dump_document(doc);
  else
    nlf::io::write_document(out_path, doc);
}

nlf::DistributedMeasurement load_measurement(const std::string& measurement_path,
                                             const std::string& alice_path,
                                             const std::string& bob_path,
                                             const std::string& state_path) {
  if (!measurement_path.empty())
    return nlf::io::measurement_from_json(
        nlf::io::read_document(measurement_path, "distributed_measurement"));
  if (alice_path.empty() || bob_path.empty() || state_path.empty())
    throw nlf::InputError("provide either --measurement or all of --alice/--bob/--state");
  auto alice = nlf::io::povm_from_json(nlf::io::read_document(alice_path, "povm"));
  auto bob = nlf::io::povm_from_json(nlf::io::read_document(bob_path, "povm"));
  auto rho = nlf::io::state_from_json(nlf::io::read_document(state_path, "state"));
  return nlf::build_distributed(alice, bob, rho);
}

int emit_failure_report(const nlf::SolverFailure& e, const std::string& quantity,
                        const std::string& out_path) {
  std::cerr << "error: " << e.what() << "\n";
  try {
    emit(nlf::io::robustness_report_to_json(e.report, quantity), out_path);
  } catch (const std::exception&) {
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robustness of Buscemi nonlocality: conic quantifiers and discrimination games"};
  app.require_subcommand(1);

  std::string measurement_path, alice_path, bob_path, state_path, instrument_path;
  std::string out_path, emit_ensemble_path, dump_program_path, suite;
  double tol = 1e-8;
  bool with_scores = false, seesaw = false;
  int seeds = 10, dims = 2;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol", tol, "solver tolerance")->check(CLI::Range(1e-10, 1e-4));
    cmd->add_option("--out", out_path, "write the report here (stdout when omitted)");
  };

  auto* c_robn = app.add_subcommand("robn", "robustness of Buscemi nonlocality of a measurement");
  c_robn->add_option("--measurement", measurement_path, "distributed_measurement document");
  c_robn->add_option("--alice", alice_path, "Alice POVM document (with --bob/--state)");
  c_robn->add_option("--bob", bob_path, "Bob POVM document");
  c_robn->add_option("--state", state_path, "shared state document");
  add_common(c_robn);

  auto* c_roe = app.add_subcommand("roe", "generalized robustness of entanglement of a state");
  c_roe->add_option("--state", state_path, "state document")->required();
  add_common(c_roe);

  auto* c_rot = app.add_subcommand("rot", "robustness of teleportation of an instrument");
  c_rot->add_option("--instrument", instrument_path, "instrument document");
  c_rot->add_option("--alice", alice_path, "Alice POVM document (with --state)");
  c_rot->add_option("--state", state_path, "shared state document");
  add_common(c_rot);

  auto* c_rstate = app.add_subcommand("robn-state",
                                      "Bell-measurement RoBN of a state, cross-checked against RoE");
  c_rstate->add_option("--state", state_path, "state document")->required();
  c_rstate->add_flag("--seesaw", seesaw, "exploratory see-saw refinement of the measurements");
  add_common(c_rstate);

  auto* c_game = app.add_subcommand("game", "extract the certificate discrimination game");
  c_game->add_option("--measurement", measurement_path, "distributed_measurement document")
      ->required();
  c_game->add_option("--emit-ensemble", emit_ensemble_path, "write the extracted ensemble here");
  c_game->add_flag("--scores", with_scores, "also compute quantum/classical scores");
  add_common(c_game);

  auto* c_verify = app.add_subcommand("verify", "run a numerical verification suite");
  c_verify->add_option("--suite", suite, "result1|result2|result4|result6|result7|properties")
      ->required();
  c_verify->add_option("--seeds", seeds, "seeded instance count");
  c_verify->add_option("--dims", dims, "local dimension");
  add_common(c_verify);

  // Optional structured dump of the solved conic program for inspection.
  c_robn->add_option("--dump-program", dump_program_path,
                     "write a structured text dump of the conic model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_robn->parsed()) {
      auto m = load_measurement(measurement_path, alice_path, bob_path, state_path);
      if (!dump_program_path.empty()) nlf::robn_program(m).dump_debug(dump_program_path);
      try {
        auto rep = nlf::robn(m, tol);
        emit(nlf::io::robustness_report_to_json(rep, "robn"), out_path);
      } catch (const nlf::SolverFailure& e) {
        return emit_failure_report(e, "robn", out_path);
      }
      return 0;
    }
    if (c_roe->parsed()) {
      auto rho = nlf::io::state_from_json(nlf::io::read_document(state_path, "state"));
      try {
        auto rep = nlf::roe(rho, tol);
        emit(nlf::io::robustness_report_to_json(rep, "roe"), out_path);
      } catch (const nlf::SolverFailure& e) {
        return emit_failure_report(e, "roe", out_path);
      }
      return 0;
    }
    if (c_rot->parsed()) {
      nlf::TeleportationInstrument inst = [&] {
        if (!instrument_path.empty())
          return nlf::io::instrument_from_json(nlf::io::read_document(instrument_path, "instrument"));
        if (alice_path.empty() || state_path.empty())
          throw nlf::InputError("provide either --instrument or --alice with --state");
        auto alice = nlf::io::povm_from_json(nlf::io::read_document(alice_path, "povm"));
        auto rho = nlf::io::state_from_json(nlf::io::read_document(state_path, "state"));
        return nlf::teleportation_instrument(alice, rho);
      }();
      try {
        auto rep = nlf::rot(inst, tol);
        emit(nlf::io::robustness_report_to_json(rep, "rot"), out_path);
      } catch (const nlf::SolverFailure& e) {
        return emit_failure_report(e, "rot", out_path);
      }
      return 0;
    }
    if (c_rstate->parsed()) {
      auto rho = nlf::io::state_from_json(nlf::io::read_document(state_path, "state"));
      nlf::RobnStateOptions opts;
      opts.tol = tol;
      opts.seesaw = seesaw;
      try {
        auto rep = nlf::robn_of_state(rho, opts);
        json doc = nlf::io::robustness_report_to_json(rep.robn_report, "robn_of_state");
        doc["roe_value"] = rep.roe_value;
        doc["disagreement"] = rep.disagreement;
        doc["consistent"] = rep.consistent;
        emit(doc, out_path);
        return 0;
      } catch (const nlf::RobnRoeMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        json doc = nlf::io::robustness_report_to_json(e.report.robn_report, "robn_of_state");
        doc["roe_value"] = e.report.roe_value;
        doc["disagreement"] = e.report.disagreement;
        doc["consistent"] = false;
        emit(doc, out_path);
        return 1;
      } catch (const nlf::SolverFailure& e) {
        return emit_failure_report(e, "robn_of_state", out_path);
      }
    }
    if (c_game->parsed()) {
      auto m = load_measurement(measurement_path, "", "", "");
      try {
        auto rep = nlf::robn(m, tol);
        auto ens = nlf::optimal_dsd_ensemble(rep);
        if (!emit_ensemble_path.empty())
          nlf::io::write_document(emit_ensemble_path, nlf::io::ensemble_to_json(ens));
        if (with_scores) {
          auto score = nlf::verify_result1(m, tol);
          emit(nlf::io::score_report_to_json(score, "dsd"), out_path);
        } else {
          json doc = nlf::io::robustness_report_to_json(rep, "robn");
          doc["ensemble"] = nlf::io::ensemble_to_json(ens);
          emit(doc, out_path);
        }
        return 0;
      } catch (const nlf::SolverFailure& e) {
        return emit_failure_report(e, "robn", out_path);
      } catch (const nlf::ResultCheckFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        emit(nlf::io::score_report_to_json(e.report, "dsd"), out_path);
        return 1;
      }
    }
    if (c_verify->parsed()) {
      auto res = nlf::verify::run_suite_by_name(suite, seeds, dims, tol);
      json doc;
      doc["schema_version"] = nlf::io::kSchemaVersion;
      doc["kind"] = "report";
      doc["report_type"] = "verify";
      doc["suite"] = res.suite;
      doc["passed"] = res.passed;
      doc["total"] = res.total;
      doc["failed"] = res.failed;
      doc["max_residual"] = res.max_residual;
      doc["wall_seconds"] = res.wall_seconds;
      doc["library_version"] = nlf::io::kLibraryVersion;
      json lines = json::array();
      for (const auto& inst : res.instances) {
        json line;
        line["label"] = inst.label;
        line["passed"] = inst.passed;
        line["residual"] = inst.residual;
        line["detail"] = inst.detail;
        lines.push_back(std::move(line));
        std::cerr << (inst.passed ? "[pass] " : "[FAIL] ") << res.suite << " " << inst.label
                  << " residual " << inst.residual << "\n";
      }
      doc["instances"] = std::move(lines);
      emit(doc, out_path);
      if (!res.passed) {
        // Emit a counterexample document per failed instance.
        int k = 0;
        for (const auto& inst : res.instances) {
          if (inst.passed) continue;
          json ce;
          ce["schema_version"] = nlf::io::kSchemaVersion;
          ce["kind"] = "report";
          ce["report_type"] = "counterexample";
          ce["suite"] = res.suite;
          ce["label"] = inst.label;
          ce["residual"] = inst.residual;
          ce["detail"] = inst.detail;
          std::ostringstream name;
          name << "counterexample_" << res.suite << "_" << k++ << ".json";
          nlf::io::write_document(name.str(), ce);
          std::cerr << "counterexample written to " << name.str() << "\n";
        }
        return 1;
      }
      return 0;
    }
  } catch (const nlf::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
