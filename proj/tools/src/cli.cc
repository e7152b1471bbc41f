// Copyright 2026 The ELA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ela/cli/commands.h"

namespace ela::cli {
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Exploited level augmentation for offline learning in zero-sum games",
               "ela"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  std::string stage;
  std::function<int()> action;

  GenDataOptions gen;
  auto* c = app.add_subcommand("gen-data", "Generate a demonstration dataset");
  c->add_option("--env", gen.env, "Environment: rps or kuhn")->capture_default_str();
  c->add_option("--games", gen.games, "Number of games (two trajectories each)")
      ->capture_default_str();
  c->add_option("--pool", gen.pool, "Pool spec: comma-separated name:param:weight")
      ->required();
  c->add_option("--rounds", gen.rounds, "Rounds per RPS episode")->capture_default_str();
  c->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  c->add_option("--out", gen.out, "Output dataset (.jsonl)")->required();
  c->callback([&] { stage = "gen-data"; action = [&] { GenData(gen, out); return 0; }; });

  TrainReprOptions repr;
  c = app.add_subcommand("train-repr", "Train the P-VRNN and the representation table");
  c->add_option("--data", repr.data, "Input dataset (.jsonl)")->required();
  c->add_option("--epochs", repr.hyper.epochs, "Training epochs")->capture_default_str();
  c->add_option("--batch-size", repr.hyper.batch_size, "Trajectories per minibatch")
      ->capture_default_str();
  c->add_option("--z-dim", repr.hyper.z_dim, "Latent width")->capture_default_str();
  c->add_option("--h-dim", repr.hyper.h_dim, "Feature width")->capture_default_str();
  c->add_option("--r-dim", repr.hyper.r_dim, "Recurrent state width")
      ->capture_default_str();
  c->add_option("--l-dim", repr.hyper.l_dim, "Representation width")
      ->capture_default_str();
  c->add_option("--lr", repr.hyper.lr, "Adam learning rate")->capture_default_str();
  c->add_option("--repr-lr", repr.hyper.repr_lr,
                "Learning rate for the representation table (<= 0: same as --lr)")
      ->capture_default_str();
  c->add_option("--seed", repr.seed, "Random seed")->capture_default_str();
  c->add_option("--out-model", repr.out_model, "Output model checkpoint")->required();
  c->add_option("--out-repr", repr.out_repr, "Output representation CSV")->required();
  c->callback([&] { stage = "train-repr"; action = [&] { TrainRepr(repr, out); return 0; }; });

  InferReprOptions infer;
  c = app.add_subcommand("infer-repr",
                         "Infer representations for new trajectories with a frozen model");
  c->add_option("--data", infer.data, "Input dataset (.jsonl)")->required();
  c->add_option("--model", infer.model, "P-VRNN checkpoint")->required();
  c->add_option("--seed", infer.seed, "Random seed")->capture_default_str();
  c->add_option("--out-repr", infer.out_repr, "Output representation CSV")->required();
  c->callback([&] { stage = "infer-repr"; action = [&] { InferRepr(infer, out); return 0; }; });

  EstimateElOptions est;
  c = app.add_subcommand("estimate-el", "Fit or apply the exploited-level model");
  c->add_option("--model", est.model,
                "EL model checkpoint (written unless --pretrained)")->required();
  c->add_option("--repr", est.repr, "Representation CSV")->required();
  c->add_option("--data", est.data, "Dataset supplying the rewards")->required();
  c->add_option("--out", est.out, "Output EL CSV")->required();
  c->add_flag("--pretrained", est.pretrained, "Load --model instead of fitting it");
  c->add_option("--estimator", est.estimator,
                "mlp (on representations) or gru (on raw trajectories)")
      ->check(CLI::IsMember({"mlp", "gru"}))
      ->capture_default_str();
  c->add_option("--gru-hidden", est.gru_hyper.hidden, "GRU estimator hidden width")
      ->capture_default_str();
  c->add_option("--gru-epochs", est.gru_hyper.epochs, "GRU estimator epochs")
      ->capture_default_str();
  c->add_option("--epochs", est.hyper.epochs, "Training epochs")->capture_default_str();
  c->add_option("--hidden", est.hyper.hidden, "Hidden width")->capture_default_str();
  c->add_option("--lr", est.hyper.lr, "Adam learning rate")->capture_default_str();
  c->add_option("--seed", est.seed, "Random seed")->capture_default_str();
  c->callback([&] { stage = "estimate-el"; action = [&] { EstimateEl(est, out); return 0; }; });

  ElDeltaOptions delta;
  c = app.add_subcommand("el-delta", "Nonparametric neighbourhood EL estimates");
  c->add_option("--repr", delta.repr, "Representation CSV")->required();
  c->add_option("--data", delta.data, "Dataset supplying the rewards")->required();
  c->add_option("--delta", delta.delta,
                "Neighbourhood radius (<= 0: 0.2 x median pairwise distance)")
      ->capture_default_str();
  c->add_option("--out", delta.out, "Output CSV")->required();
  c->callback([&] { stage = "el-delta"; action = [&] { ElDeltaCommand(delta, out); return 0; }; });

  TrainPolicyOptions pol;
  c = app.add_subcommand("train-policy", "Behaviour cloning on a filtered dataset");
  c->add_option("--data", pol.data, "Input dataset (.jsonl)")->required();
  c->add_option("--filter", pol.filter, "none, wt or ela")->capture_default_str();
  c->add_option("--el", pol.el, "EL CSV (required for --filter ela)");
  c->add_option("--thresh", pol.thresh, "Keep trajectories with scaled EL <= thresh")
      ->capture_default_str();
  c->add_option("--epochs", pol.hyper.epochs, "Training epochs")->capture_default_str();
  c->add_option("--minibatches", pol.hyper.minibatches, "Minibatches per epoch")
      ->capture_default_str();
  c->add_option("--hidden", pol.hyper.hidden, "Hidden width")->capture_default_str();
  c->add_option("--lr", pol.hyper.lr, "Adam learning rate")->capture_default_str();
  c->add_option("--seed", pol.seed, "Random seed")->capture_default_str();
  c->add_option("--out", pol.out, "Output policy checkpoint")->required();
  c->add_option("--out-data", pol.out_data, "Optional: write the filtered dataset here");
  c->callback([&] { stage = "train-policy"; action = [&] { TrainPolicy(pol, out); return 0; }; });

  EvaluateOptions ev;
  c = app.add_subcommand("evaluate", "Average score of a policy against a policy or pool");
  c->add_option("--a", ev.a, "Policy checkpoint")->required();
  c->add_option("--b", ev.b, "Policy checkpoint or pool:<spec>")->required();
  c->add_option("--games", ev.games, "Games to play")->capture_default_str();
  c->add_option("--seed", ev.seed, "Random seed")->capture_default_str();
  c->add_option("--out", ev.out, "Optional CSV output");
  c->callback([&] { stage = "evaluate"; action = [&] { Evaluate(ev, out); return 0; }; });

  CrossEvalOptions cross;
  c = app.add_subcommand("cross-eval", "Score matrix over every policy in a directory");
  c->add_option("--models", cross.models, "Directory of policy checkpoints")->required();
  c->add_option("--games", cross.games, "Games per pair")->capture_default_str();
  c->add_option("--seed", cross.seed, "Random seed")->capture_default_str();
  c->add_option("--out", cross.out, "Output matrix CSV")->required();
  c->callback([&] { stage = "cross-eval"; action = [&] { CrossEval(cross, out); return 0; }; });

  VerifyToyOptions toy;
  c = app.add_subcommand("verify-toy", "Monte-Carlo check of the simplex toy model");
  c->add_option("--n", toy.n, "Number of pure strategies")->capture_default_str();
  c->add_option("--samples", toy.samples, "Samples per profile")->capture_default_str();
  c->add_option("--profiles", toy.profiles, "Number of profiles")->capture_default_str();
  c->add_option("--seed", toy.seed, "Random seed")->capture_default_str();
  c->add_option("--out", toy.out, "Optional CSV output");
  c->callback([&] { stage = "verify-toy"; action = [&] { VerifyToy(toy, out); return 0; }; });

  VerifyPropsOptions props;
  c = app.add_subcommand("verify-props", "Randomized checks of the two bounds");
  c->add_option("--trials", props.trials, "Random instances")->capture_default_str();
  c->add_option("--seed", props.seed, "Random seed")->capture_default_str();
  c->add_option("--out", props.out, "Optional CSV output");
  c->callback([&] {
    stage = "verify-props";
    action = [&] { return VerifyProps(props, out) == 0 ? 0 : 2; };
  });

  ExportEmbeddingsOptions emb;
  c = app.add_subcommand("export-embeddings", "Merge representations and EL for plotting");
  c->add_option("--repr", emb.repr, "Representation CSV")->required();
  c->add_option("--el", emb.el, "EL CSV")->required();
  c->add_option("--out", emb.out, "Output CSV")->required();
  c->callback([&] {
    stage = "export-embeddings";
    action = [&] { ExportEmbeddings(emb, out); return 0; };
  });

  std::string config_path;
  std::vector<std::string> overrides;
  c = app.add_subcommand("run-pipeline", "Run every stage end to end");
  c->add_option("--config", config_path, "key=value configuration file");
  c->add_option("--set", overrides, "Override one key (key=value); repeatable");
  c->callback([&] {
    stage = "run-pipeline";
    action = [&] {
      RunConfig config = config_path.empty() ? RunConfig() : RunConfig::FromFile(config_path);
      for (const auto& o : overrides) config.SetAssignment(o);
      const PipelineResult r = RunPipeline(config, out);
      out << fmt::format("bc {:.6f} wt {:.6f} ela {:.6f} (threshold {})\n",
                         r.bc_exploitability, r.wt_exploitability,
                         r.ela_exploitability, r.ela_threshold);
      return 0;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help and parse errors go to the caller's streams, not std::cout.
    return app.exit(e, out, err);
  }
  try {
    return action();
  } catch (const StageError& e) {
    err << fmt::format("error [{}/{}]: {}\n", stage, e.stage(), e.what());
  } catch (const std::exception& e) {
    err << fmt::format("error [{}]: {}\n", stage, e.what());
  }
  return 1;
}

}  // namespace ela::cli
