// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// fails. `acceptance_tests 4` runs only criterion 4.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cli_runner.hpp"
#include "corerev/codelex/lexer.hpp"
#include "corerev/corpus/dataset.hpp"
#include "corerev/model/check.hpp"
#include "corerev/model/checkpoint.hpp"
#include "corerev/model/core.hpp"
#include "corerev/model/train.hpp"
#include "corerev/random.hpp"
#include "corerev/rankeval/metrics.hpp"
#include "corerev/rankeval/pools.hpp"
#include "corerev/rankeval/tfidf.hpp"
#include "corerev/tensornet/layers.hpp"
#include "corerev/tensornet/ops.hpp"
#include "golden.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace corerev;
using namespace corerev::testsupport;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a failed sub-check; the first few are kept in the detail.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
    pass = false;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome gradient_suite() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::size_t groups = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto r = model::check_model_gradients(model::tiny_config(), seed);
    groups = r.groups.size();
    worst = std::max(worst, r.max_rel_error);
    o.require(r.passed(1e-4), fmt::format("seed {} {} rel {:.3g}", seed, r.worst, r.max_rel_error));
  }
  double secs = seconds_since(t0);
  o.require(secs < 60, fmt::format("took {:.1f}s", secs));
  o.note(fmt::format("10 seeds x {} groups, worst rel {:.2e}, {:.1f}s", groups, worst, secs));
  return o;
}

Outcome overfit() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto pos = preprocess_all(random_pairs(20, 3));
  auto neg = corpus::sample_negatives(pos, 2, 5);
  auto all = pos;
  all.insert(all.end(), neg.begin(), neg.end());
  auto cfg = model::tiny_config();
  cfg.lr = 1e-2;
  auto vocabs = model::build_vocabs(pos, cfg);
  auto params = model::CoreModelParams::initialize(cfg, vocabs.code.size(), vocabs.review.size());
  auto enc = model::encode_pairs(all, vocabs);
  auto history = model::train(params, enc, cfg, vocabs);
  auto pools = rankeval::build_pools(pos, {}, 10, 9);
  auto ev = rankeval::evaluate(pools, model::make_model_scorer(params, cfg, vocabs, pools));
  double secs = seconds_since(t0);
  double final_loss = history.train_loss.back();
  o.require(std::abs(history.initial_loss - 1.0 / 3.0) < 0.01,
            fmt::format("initial loss {:.4f}", history.initial_loss));
  o.require(final_loss < 0.05, fmt::format("final loss {:.4f}", final_loss));
  o.require(ev.report.mrr >= 0.95, fmt::format("MRR {:.3f} < 0.95", ev.report.mrr));
  o.require(secs < 120, fmt::format("took {:.1f}s", secs));
  o.note(fmt::format("loss {:.4f} -> {:.4f}, MRR {:.3f} on 11-candidate pools, {:.1f}s",
                     history.initial_loss, final_loss, ev.report.mrr, secs));
  return o;
}

Outcome metric_oracle() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::vector<std::size_t> ranks(1 + uniform_index(rng, 200));
    for (auto& r : ranks) r = 1 + uniform_index(rng, 51);
    double inv = 0;
    for (auto r : ranks) inv += 1.0 / static_cast<double>(r);
    o.require(rankeval::mrr(ranks) == inv / static_cast<double>(ranks.size()),
              fmt::format("mrr differs at seed {}", seed));
    for (std::size_t k : {1, 3, 5, 10}) {
      std::size_t hits = 0;
      for (auto r : ranks) hits += r <= k ? 1 : 0;
      o.require(rankeval::recall_at_k(ranks, k) ==
                    static_cast<double>(hits) / static_cast<double>(ranks.size()),
                fmt::format("recall@{} differs at seed {}", k, seed));
    }
  }
  Rng rng(2024);
  std::vector<std::size_t> ranks;
  std::vector<double> s(51);
  for (int trial = 0; trial < 2000; ++trial) {
    for (double& v : s) v = uniform_unit(rng);
    ranks.push_back(rankeval::rank_of(rankeval::rank_pool(s), static_cast<std::size_t>(trial % 51)));
  }
  double harmonic = 0;
  for (int n = 1; n <= 51; ++n) harmonic += 1.0 / n;
  double chance = harmonic / 51.0;
  double got = rankeval::mrr(ranks);
  o.require(std::abs(got - chance) <= 0.01, fmt::format("random MRR {:.4f} vs {:.4f}", got, chance));
  o.note(fmt::format("100 rank vectors exact; random MRR {:.4f} vs H(51)/51 = {:.4f}", got, chance));
  return o;
}

Outcome ablation_ordering() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  JointCueOptions opts;
  auto all = preprocess_all(joint_cue_corpus(opts), {100, 50, kJointCueCharWindow});
  std::vector<corpus::ReviewPair> train(all.begin(), all.begin() + 400);
  std::vector<corpus::ReviewPair> test(all.begin() + 400, all.end());
  auto examples = train;
  auto neg = corpus::sample_negatives(train, 2, 5);
  examples.insert(examples.end(), neg.begin(), neg.end());
  auto pools = rankeval::build_pools(test, {}, 50, 9);

  auto run = [&](model::Ablation ablation) {
    auto cfg = model::tiny_config();
    cfg.char_onehot = 40;
    cfg.train_embeddings = true;
    cfg.dropout = 0.0;
    cfg.lr = 1e-2;
    cfg.epochs = 60;
    cfg.ablation = ablation;
    auto vocabs = model::build_vocabs(train, cfg);
    auto params = model::CoreModelParams::initialize(cfg, vocabs.code.size(), vocabs.review.size());
    model::train(params, model::encode_pairs(examples, vocabs), cfg, vocabs);
    return rankeval::evaluate(pools, model::make_model_scorer(params, cfg, vocabs, pools)).report.mrr;
  };
  double full = run(model::Ablation::full);
  double wv = run(model::Ablation::no_char);
  double cv = run(model::Ablation::no_word);
  double secs = seconds_since(t0);
  o.require(full > wv, fmt::format("full {:.3f} <= WV {:.3f}", full, wv));
  o.require(full > cv, fmt::format("full {:.3f} <= CV {:.3f}", full, cv));
  o.require(secs < 600, fmt::format("took {:.1f}s", secs));
  o.note(fmt::format("MRR full {:.3f}, WV {:.3f}, CV {:.3f} (chance {:.3f}), {:.1f}s", full, wv,
                     cv, rankeval::random_mrr(51), secs));
  return o;
}

// Ranks of each query's own review among 50 distractors from `bank` alone.
std::vector<std::size_t> bank_ranks(const rankeval::TfidfBaseline& lr,
                                    const std::vector<corpus::ReviewPair>& queries,
                                    const std::vector<corpus::ReviewPair>& bank,
                                    std::uint64_t seed) {
  std::vector<std::size_t> ranks;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    auto pools = rankeval::build_pools({queries[q]}, bank, 50, derive_seed(seed, q));
    auto scorer = [&](std::size_t qi, std::size_t r) {
      return lr.score(pools.queries[qi].code_tokens, pools.reviews[r].review_tokens);
    };
    ranks.push_back(rankeval::evaluate(pools, scorer).ranks[0]);
  }
  return ranks;
}

Outcome baseline_sanity() {
  Outcome o;
  auto separable = marker_set(500, 200, 1000, 1, false);
  auto lr = rankeval::TfidfBaseline::train(separable.train);
  double sep = rankeval::mrr(bank_ranks(lr, separable.test_queries, separable.bank, 2));
  o.require(sep >= 0.9, fmt::format("separable MRR {:.3f}", sep));

  // Shuffled labels: the pools hold the queries' own reviews only, so the
  // true review and its distractors come from one distribution.
  auto shuffled = marker_set(500, 1000, 0, 1, true);
  auto noise = rankeval::TfidfBaseline::train(shuffled.train);
  auto pools = rankeval::build_pools(shuffled.test_queries, {}, 50, 3);
  auto scorer = [&](std::size_t q, std::size_t r) {
    return noise.score(pools.queries[q].code_tokens, pools.reviews[r].review_tokens);
  };
  double shuf = rankeval::evaluate(pools, scorer).report.mrr;
  double chance = rankeval::random_mrr(51);
  o.require(std::abs(shuf - chance) <= 0.02,
            fmt::format("shuffled MRR {:.4f} vs chance {:.4f}", shuf, chance));
  o.note(fmt::format("separable MRR {:.3f}; shuffled MRR {:.4f} vs chance {:.4f}", sep, shuf,
                     chance));
  return o;
}

Outcome tokenizer_goldens() {
  Outcome o;
  auto goldens = load_lexer_goldens(std::filesystem::path(COREREV_FIXTURE_DIR) / "lexer");
  o.require(!goldens.empty(), "no golden fixtures found");
  for (const auto& g : goldens) {
    auto why = golden_mismatch(g);
    o.require(why.empty(), g.name + ": " + why);
  }
  std::vector<std::string> texts;
  for (const auto& t : codelex::tokenize_code("private final int shuffleId;")) texts.push_back(t.text);
  o.require(texts == std::vector<std::string>{"private", "final", "int", "shuffleId", ";"},
            "shuffleId example");
  o.note(fmt::format("{} fixtures plus the shuffleId example", goldens.size()));
  return o;
}

const char* kPipelineSettings =
    "word_dim=12\nhidden=8\nattn_dim=8\nchar_onehot=30\n"
    "epochs=3\nlr=0.01\nbatch=8\nneg_m=2\nseed=5\nsgns_epochs=1\n";

// prepare -> vocab -> pretrain -> train -> evaluate under `dir`.
bool run_pipeline(const TempDir& dir, const std::filesystem::path& raw, Outcome& o) {
  auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << kPipelineSettings;
  const std::string data = (dir / "d").string();
  for (std::string stage : {"prepare", "vocab", "pretrain", "train", "evaluate"}) {
    std::vector<std::string> args = {stage, "--config", cfg.string(), "--data", data, "--quiet"};
    if (stage == "prepare") {
      args.push_back("--dataset");
      args.push_back(raw.string());
    }
    auto r = run_command(COREREV_CLI_PATH, args, {});
    o.require(r.exit_code == 0, stage + " exited " + std::to_string(r.exit_code) + ": " + r.err);
    if (r.exit_code != 0) return false;
  }
  return true;
}

Outcome determinism() {
  Outcome o;
  TempDir a, b;
  auto raw = a / "raw.jsonl";
  write_raw_dataset(raw, random_pairs(220, 12));
  if (!run_pipeline(a, raw, o) || !run_pipeline(b, raw, o)) return o;
  auto report = read_file(a / "d" / "report.json");
  o.require(!report.empty(), "empty report");
  o.require(report == read_file(b / "d" / "report.json"), "reports differ");
  o.require(read_file(a / "d" / "model.ckpt") == read_file(b / "d" / "model.ckpt"),
            "checkpoints differ");

  auto ck = model::load_checkpoint(a / "d" / "model.ckpt");
  model::save_checkpoint(a / "again.ckpt", ck);
  o.require(read_file(a / "again.ckpt") == read_file(a / "d" / "model.ckpt"),
            "re-saved checkpoint differs");
  auto back = model::load_checkpoint(a / "again.ckpt");
  o.require(back.params == ck.params && back.config == ck.config && back.vocabs == ck.vocabs &&
                back.history == ck.history,
            "reloaded checkpoint differs");
  o.note(fmt::format("report {} bytes identical across runs; checkpoint re-save identical",
                     report.size()));
  return o;
}

Outcome invariants() {
  Outcome o;
  std::size_t cases = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::size_t n = 1 + uniform_index(rng, 30);
    std::size_t len = 1 + uniform_index(rng, n);
    std::vector<double> logits(n);
    for (double& v : logits) v = uniform_real(rng, -50, 50);
    auto p = tensornet::masked_softmax(logits, len);
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    o.require(std::abs(total - 1.0) <= 1e-6, fmt::format("softmax sum {} seed {}", total, seed));
    for (std::size_t t = len; t < n; ++t) o.require(p[t] == 0.0, "masked softmax leaks");
    ++cases;
  }

  // Attention: padded rows get zero weight, and changing them changes nothing.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::size_t T = 2 + uniform_index(rng, 10), L = 1 + uniform_index(rng, T - 1), d = 4;
    tensornet::AttentionParams ap(d, 3);
    ap.initialize(rng, 2.0);
    auto h = tensornet::Tensor::matrix(T, d);
    tensornet::uniform_fill(h, rng, 2.0);
    auto alpha = tensornet::attention_weights(h, ap, L);
    for (std::size_t t = L; t < T; ++t) o.require(alpha[t] == 0.0, "padded position weighted");
    auto perturbed = h;
    for (std::size_t t = L; t < T; ++t) {
      for (std::size_t k = 0; k < d; ++k) perturbed.at(t, k) += 100.0;
    }
    tensornet::Tape tape;
    auto x = tensornet::attention_pool(tape, tape.constant(h), ap, L);
    auto y = tensornet::attention_pool(tape, tape.constant(perturbed), ap, L);
    o.require(std::ranges::equal(tape.value(x).values(), tape.value(y).values()),
              "pooling reads padded rows");
    ++cases;
  }

  // Score range over random weights, including large ones that saturate.
  auto pos = preprocess_all(random_pairs(30, 8));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto cfg = model::tiny_config();
    cfg.seed = seed;
    cfg.init_scale = 0.05 * static_cast<double>(1 + seed);
    auto vocabs = model::build_vocabs(pos, cfg);
    auto params = model::CoreModelParams::initialize(cfg, vocabs.code.size(), vocabs.review.size());
    for (const auto& e : model::encode_pairs(pos, vocabs)) {
      double s = model::score_pair(e, params, cfg);
      o.require(s > -1.0 && s < 1.0, fmt::format("score {} at seed {}", s, seed));
      ++cases;
    }
  }

  // Split disjointness and the negative-sample contract.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto raw = random_pairs(20 + uniform_index(rng, 200), seed + 500);
    auto split = corpus::split_dataset(raw, {}, seed);
    std::set<std::string> ids;
    std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> content;
    for (const auto* part : {&split.train, &split.valid, &split.test}) {
      for (const auto& p : *part) {
        o.require(ids.insert(p.id).second, "id in two partitions: " + p.id);
        o.require(content.emplace(p.code_tokens, p.review_tokens).second, "pair repeated: " + p.id);
      }
    }
    o.require(ids.size() == raw.size(), "split lost pairs");
    std::size_t m = 1 + uniform_index(rng, 5);
    auto neg = corpus::sample_negatives(split.train, m, seed);
    o.require(neg.size() == split.train.size() * m, "wrong negative count");
    for (std::size_t i = 0; i < split.train.size(); ++i) {
      std::set<std::vector<std::string>> drawn;
      for (std::size_t k = 0; k < m; ++k) {
        const auto& ng = neg[i * m + k];
        o.require(ng.label == 0.0F, "negative labelled 1");
        o.require(ng.code_tokens == split.train[i].code_tokens, "negative for the wrong code");
        o.require(ng.review_tokens != split.train[i].review_tokens, "self-paired negative");
        o.require(drawn.insert(ng.review_tokens).second, "negative drawn twice");
      }
    }
    ++cases;
  }
  o.note(fmt::format("{} property cases", cases));
  return o;
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient suite", gradient_suite},
      {2, "overfit", overfit},
      {3, "metric oracle", metric_oracle},
      {4, "ablation ordering", ablation_ordering},
      {5, "baseline sanity", baseline_sanity},
      {6, "tokenizer goldens", tokenizer_goldens},
      {7, "determinism", determinism},
      {8, "invariants", invariants},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d %s: %s (%s)\n", c.number, c.name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
