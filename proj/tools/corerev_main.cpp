// SPDX-License-Identifier: Apache-2.0
// corerev: prepare -> vocab -> pretrain -> train -> evaluate, plus
// recommend, gradcheck, lex and fetch.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "corerev/cli/run_config.hpp"
#include "corerev/codelex/diff.hpp"
#include "corerev/codelex/lexer.hpp"
#include "corerev/corpus/dataset.hpp"
#include "corerev/corpus/fetch.hpp"
#include "corerev/embed/sgns.hpp"
#include "corerev/embed/vocab.hpp"
#include "corerev/error.hpp"
#include "corerev/model/check.hpp"
#include "corerev/model/checkpoint.hpp"
#include "corerev/model/train.hpp"
#include "corerev/random.hpp"
#include "corerev/rankeval/metrics.hpp"
#include "corerev/rankeval/pools.hpp"
#include "corerev/rankeval/tfidf.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace corerev;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheck = 3;

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags every subcommand accepts.
struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> keyed;  // flag value by setting key
  bool quiet = false;
  bool json_out = false;
};

struct Output {
  bool quiet = false;
  bool json_out = false;
  void progress(const std::string& line) const {
    if (!quiet) std::cerr << line << "\n";
  }
  void result(const json& j, const std::string& human) const {
    if (json_out) {
      std::cout << j.dump() << "\n";
    } else if (!quiet && !human.empty()) {
      std::cout << human;
      if (human.back() != '\n') std::cout << "\n";
    }
  }
};

void add_common(CLI::App* sub, Common& c, const std::vector<std::string>& keys) {
  sub->add_option("--config", c.config_file, "key=value settings file");
  sub->add_option("--set", c.sets, "override one setting, key=value")->allow_extra_args(false);
  sub->add_flag("--quiet", c.quiet, "no progress or summary output");
  sub->add_flag("--json", c.json_out, "print the result as one JSON line");
  for (const auto& key : keys) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    sub->add_option(flag, c.keyed[key], "setting " + key);
  }
}

cli::RunConfig resolve_config(const std::string& name, const Common& c) {
  std::vector<std::pair<std::string, std::string>> file, flags;
  if (!c.config_file.empty()) file = cli::read_settings_file(c.config_file);
  for (const auto& s : c.sets) {
    auto parsed = cli::parse_settings(s, "--set");
    if (parsed.size() != 1) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
    flags.push_back(parsed[0]);
  }
  for (const auto& [k, v] : c.keyed) {
    if (!v.empty()) flags.emplace_back(k, v);
  }
  return cli::resolve(name, file, cli::environment_paths(cli::process_environment()), flags);
}

// Missing inputs name the stage that produces them.
void require(const fs::path& p, const std::string& stage) {
  if (!fs::exists(p)) {
    throw DataError(fmt::format("missing {}: run `corerev {}` first", p.string(), stage));
  }
}

std::vector<corpus::ReviewPair> positives(const std::vector<corpus::ReviewPair>& pairs) {
  std::vector<corpus::ReviewPair> out;
  for (const auto& p : pairs) {
    if (p.label == 1.0F) out.push_back(p);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Artifacts {
  fs::path dir;
  fs::path train() const { return dir / "train.jsonl"; }
  fs::path valid() const { return dir / "valid.jsonl"; }
  fs::path test() const { return dir / "test.jsonl"; }
  fs::path code_vocab() const { return dir / "code.vocab"; }
  fs::path review_vocab() const { return dir / "review.vocab"; }
  fs::path alphabet() const { return dir / "chars.alphabet"; }
  fs::path code_emb() const { return dir / "code.emb"; }
  fs::path review_emb() const { return dir / "review.emb"; }
};

model::ModelVocabs load_vocabs(const Artifacts& a) {
  for (const auto& p : {a.code_vocab(), a.review_vocab(), a.alphabet()}) require(p, "vocab");
  return {embed::load_vocab(a.code_vocab()), embed::load_vocab(a.review_vocab()),
          embed::load_alphabet(a.alphabet())};
}

int cmd_prepare(const cli::RunConfig& rc, const Output& out) {
  fs::path dataset = rc.path("dataset");
  if (dataset.empty()) throw ConfigError("prepare needs --dataset (or COREREV_DATASET)");
  require(dataset, "fetch");
  Artifacts a{rc.path("data")};
  fs::create_directories(a.dir);
  auto raw = corpus::deduplicate(corpus::load_dataset(dataset));
  auto split = corpus::split_dataset(raw, {}, rc.model.seed);
  auto negatives = corpus::sample_negatives(split.train, rc.model.neg_m, derive_seed(rc.model.seed, 2));
  auto train = split.train;
  train.insert(train.end(), negatives.begin(), negatives.end());
  corpus::save_pairs(a.train(), train);
  corpus::save_pairs(a.valid(), split.valid);
  corpus::save_pairs(a.test(), split.test);
  cli::write_effective_config(rc, a.dir);
  json j = {{"pairs", raw.size()},
            {"train", split.train.size()},
            {"train_negatives", negatives.size()},
            {"valid", split.valid.size()},
            {"test", split.test.size()}};
  out.result(j, fmt::format("{} pairs: train {} (+{} negatives), valid {}, test {}\n", raw.size(),
                            split.train.size(), negatives.size(), split.valid.size(),
                            split.test.size()));
  return 0;
}

int cmd_vocab(const cli::RunConfig& rc, const Output& out) {
  Artifacts a{rc.path("data")};
  require(a.train(), "prepare");
  auto v = model::build_vocabs(positives(corpus::load_pairs(a.train())), rc.model);
  embed::save_vocab(a.code_vocab(), v.code);
  embed::save_vocab(a.review_vocab(), v.review);
  embed::save_alphabet(a.alphabet(), v.chars);
  cli::write_effective_config(rc, a.dir);
  json j = {{"code_vocab", v.code.size()},
            {"review_vocab", v.review.size()},
            {"alphabet", v.chars.size()}};
  out.result(j, fmt::format("code vocab {}, review vocab {}, alphabet {}\n", v.code.size(),
                            v.review.size(), v.chars.size()));
  return 0;
}

int cmd_pretrain(const cli::RunConfig& rc, const Output& out) {
  Artifacts a{rc.path("data")};
  require(a.train(), "prepare");
  auto v = load_vocabs(a);
  auto pos = positives(corpus::load_pairs(a.train()));
  std::vector<std::vector<int>> code, review;
  for (const auto& p : pos) {
    code.push_back(v.code.encode(p.code_tokens));
    review.push_back(v.review.encode(p.review_tokens));
  }
  auto sg = rc.sgns();
  out.progress("pretraining code embeddings");
  embed::save_embeddings(a.code_emb(), embed::train_sgns(code, v.code.size(), sg).embeddings, v.code);
  sg.seed = derive_seed(rc.model.seed, 3);
  out.progress("pretraining review embeddings");
  embed::save_embeddings(a.review_emb(), embed::train_sgns(review, v.review.size(), sg).embeddings,
                         v.review);
  cli::write_effective_config(rc, a.dir);
  json j = {{"dim", sg.dim}, {"code_rows", v.code.size()}, {"review_rows", v.review.size()}};
  out.result(j, fmt::format("{}-dim embeddings for {} code and {} review tokens\n", sg.dim,
                            v.code.size(), v.review.size()));
  return 0;
}

json history_json(const model::TrainingHistory& h) {
  json valid = json::array();
  for (const auto& m : h.valid_mrr) valid.push_back(m ? json(*m) : json(nullptr));
  auto best = h.best_epoch();
  return {{"initial_loss", h.initial_loss},
          {"train_loss", h.train_loss},
          {"valid_mrr", valid},
          {"best_epoch", best ? json(*best) : json(nullptr)}};
}

int cmd_train(const cli::RunConfig& rc, const Output& out) {
  Artifacts a{rc.path("data")};
  require(a.train(), "prepare");
  auto vocabs = load_vocabs(a);
  const auto& c = rc.model;
  if (vocabs.chars.size() != c.char_onehot) {
    throw ConfigError(fmt::format("alphabet width {} from the vocab stage but char_onehot={}; "
                                  "rerun `corerev vocab` with the same settings",
                                  vocabs.chars.size(), c.char_onehot));
  }
  auto params = model::CoreModelParams::initialize(c, vocabs.code.size(), vocabs.review.size());
  if (rc.pretrained) {
    require(a.code_emb(), "pretrain");
    require(a.review_emb(), "pretrain");
    std::size_t n = model::load_pretrained(params.code.embedding, vocabs.code,
                                           embed::load_embeddings(a.code_emb()));
    n += model::load_pretrained(params.review.embedding, vocabs.review,
                                embed::load_embeddings(a.review_emb()));
    out.progress(fmt::format("loaded {} pretrained rows", n));
  }
  auto examples = model::encode_pairs(corpus::load_pairs(a.train()), vocabs);
  model::TrainOptions opts;
  if (fs::exists(a.valid())) opts.valid = positives(corpus::load_pairs(a.valid()));
  opts.valid_pool = rc.valid_pool;
  opts.valid_seed = derive_seed(c.seed, 4);
  opts.on_epoch = [&](std::size_t epoch, double loss, std::optional<double> mrr) {
    out.progress(mrr ? fmt::format("epoch {} loss {:.6f} valid mrr {:.4f}", epoch + 1, loss, *mrr)
                     : fmt::format("epoch {} loss {:.6f}", epoch + 1, loss));
  };
  auto history = model::train(params, examples, c, vocabs, opts);
  fs::path ckpt = rc.path("checkpoint");
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  model::save_checkpoint(ckpt, {c, vocabs, params, history});
  auto hist = history_json(history);
  write_text(fs::path(ckpt).replace_extension(".history.json"), hist.dump(2) + "\n");
  cli::write_effective_config(rc, ckpt.has_parent_path() ? ckpt.parent_path() : fs::path("."));
  double last = history.train_loss.empty() ? history.initial_loss : history.train_loss.back();
  out.result({{"checkpoint", ckpt.string()}, {"history", hist}},
             fmt::format("trained {} epochs, loss {:.6f} -> {:.6f}, checkpoint {}\n",
                         history.train_loss.size(), history.initial_loss, last, ckpt.string()));
  return 0;
}

struct EvalModes {
  bool oracle = false;
  bool inverted = false;
  bool baseline = false;
};

int cmd_evaluate(const cli::RunConfig& rc, const EvalModes& modes, const Output& out) {
  Artifacts a{rc.path("data")};
  require(a.test(), "prepare");
  auto pools = rankeval::build_pools(positives(corpus::load_pairs(a.test())), {}, rc.pool_size,
                                     derive_seed(rc.model.seed, 5));
  std::string name;
  rankeval::Evaluation ev;
  if (modes.oracle || modes.inverted) {
    name = modes.inverted ? "inverted-oracle" : "oracle";
    ev = rankeval::evaluate(pools, rankeval::oracle_scorer(pools, modes.inverted));
  } else if (modes.baseline) {
    require(a.train(), "prepare");
    name = "tfidf-logreg";
    auto base = rankeval::TfidfBaseline::train(corpus::load_pairs(a.train()));
    ev = rankeval::evaluate(pools, [&](std::size_t q, std::size_t r) {
      return base.score(pools.queries[q].code_tokens, pools.reviews[r].review_tokens);
    });
  } else {
    fs::path ckpt = rc.path("checkpoint");
    require(ckpt, "train");
    auto ck = model::load_checkpoint(ckpt);
    name = std::string(model::to_string(ck.config.ablation));
    ev = rankeval::evaluate(pools, model::make_model_scorer(ck.params, ck.config, ck.vocabs, pools));
  }
  json report = rankeval::to_json(ev.report);
  report["scorer"] = name;
  fs::path path = rc.path("report");
  write_text(path, report.dump(2) + "\n");
  cli::write_effective_config(rc, path.has_parent_path() ? path.parent_path() : fs::path("."));
  out.result(report, fmt::format("scorer {}\n{}", name, rankeval::format_table(ev.report)));
  return 0;
}

// Bank lines are either prepared pairs (review_tokens) or raw records with
// a "review" string.
struct BankEntry {
  corpus::ReviewPair pair;
  std::string text;
};

std::vector<BankEntry> load_bank(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open review bank {}", path.string()));
  std::vector<BankEntry> bank;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(fmt::format("{}:{}: invalid JSON ({})", path.string(), no, e.what()));
    }
    BankEntry e;
    if (j.contains("review_tokens")) {
      e.pair.id = j.value("id", std::to_string(no));
      e.pair.review_tokens = j.at("review_tokens").get<std::vector<std::string>>();
      e.pair.review_chars = j.value("review_chars", std::string());
      for (const auto& t : e.pair.review_tokens) e.text += (e.text.empty() ? "" : " ") + t;
    } else if (j.contains("review") && j["review"].is_string()) {
      e.text = j["review"].get<std::string>();
      e.pair = corpus::preprocess({j.value("id", std::to_string(no)), "", "", e.text});
    } else {
      throw DataError(fmt::format("{}:{}: no review or review_tokens field", path.string(), no));
    }
    bank.push_back(std::move(e));
  }
  if (bank.empty()) throw DataError(fmt::format("review bank {} is empty", path.string()));
  return bank;
}

int cmd_recommend(const cli::RunConfig& rc, const fs::path& diff, const fs::path& bank_path,
                  std::size_t k, const Output& out) {
  if (diff.empty() || bank_path.empty()) throw ConfigError("recommend needs --diff and --bank");
  fs::path ckpt = rc.path("checkpoint");
  require(ckpt, "train");
  auto ck = model::load_checkpoint(ckpt);
  auto bank = load_bank(bank_path);
  rankeval::PoolSet set;
  set.queries.push_back(corpus::preprocess({"query", "", slurp(diff), ""}));
  for (const auto& e : bank) set.reviews.push_back(e.pair);
  auto scorer = model::make_model_scorer(ck.params, ck.config, ck.vocabs, set);
  std::vector<double> scores;
  for (std::size_t r = 0; r < set.reviews.size(); ++r) scores.push_back(scorer(0, r));
  auto ranked = rankeval::rank_pool(scores);
  ranked.resize(std::min(k, ranked.size()));
  json list = json::array();
  std::string human;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& e = bank[ranked[i]];
    list.push_back({{"rank", i + 1}, {"score", scores[ranked[i]]}, {"id", e.pair.id}, {"review", e.text}});
    human += fmt::format("{}\t{:.6f}\t{}\n", i + 1, scores[ranked[i]], e.text);
  }
  out.result({{"recommendations", list}}, human);
  return 0;
}

int cmd_gradcheck(const cli::RunConfig& rc, std::size_t seeds, double tolerance,
                  const Output& out) {
  auto c = model::tiny_config();
  c.ablation = rc.model.ablation;
  c.scorer = rc.model.scorer;
  json runs = json::array();
  std::string human;
  bool ok = true;
  for (std::size_t i = 0; i < seeds; ++i) {
    auto r = model::check_model_gradients(c, rc.model.seed + i);
    ok = ok && r.passed(tolerance);
    runs.push_back(model::to_json(r));
    human += fmt::format("seed {}: {} groups, max rel error {:.3g} at {} {}\n", r.seed,
                         r.groups.size(), r.max_rel_error, r.worst,
                         r.passed(tolerance) ? "ok" : "FAIL");
  }
  cli::write_effective_config(rc, rc.path("data"));
  out.result({{"passed", ok}, {"tolerance", tolerance}, {"runs", runs}}, human);
  if (!ok) throw CheckFailed(fmt::format("gradient check above {}", tolerance));
  return 0;
}

int cmd_lex(const fs::path& diff, const Output& out) {
  if (diff.empty()) throw ConfigError("lex needs --diff");
  std::string text = slurp(diff);
  json toks = json::array();
  std::string human;
  for (const auto& line : codelex::split_diff(text)) {
    for (const auto& t : codelex::tokenize_code(line.content)) {
      toks.push_back({{"change", codelex::to_string(line.change_kind)},
                      {"kind", codelex::to_string(t.kind)},
                      {"text", t.text}});
      human += fmt::format("{}\t{}\t{}\n", codelex::to_string(line.change_kind), codelex::to_string(t.kind),
                           t.text);
    }
  }
  out.result({{"tokens", toks}, {"code_change_tokens", codelex::code_change_tokens(text)}}, human);
  return 0;
}

int cmd_fetch(const std::string& repo, int pr, const fs::path& dest, const corpus::FetchOptions& opts,
              const Output& out) {
  if (repo.empty() || pr <= 0 || dest.empty()) throw ConfigError("fetch needs --repo, --pr and --out");
  auto pairs = corpus::fetch_pull_comments(repo, pr, opts);
  std::string text;
  for (const auto& p : pairs) {
    text += json{{"id", p.id}, {"project", p.project}, {"code_change", p.code_change}, {"review", p.review}}
                .dump() +
            "\n";
  }
  write_text(dest, text);
  out.result({{"pairs", pairs.size()}, {"out", dest.string()}},
             fmt::format("{} review comments written to {}\n", pairs.size(), dest.string()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corerev: rank review comments for a code change"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  std::vector<std::string> model_keys;
  for (const auto& [k, v] : model::describe(model::ModelConfig{})) model_keys.push_back(k);
  std::vector<std::string> data_keys = {"data", "seed"};
  auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  };

  std::map<std::string, Common> common;
  auto* prepare = app.add_subcommand("prepare", "split a raw JSONL dataset and sample negatives");
  add_common(prepare, common["prepare"], with(data_keys, {"dataset", "neg_m"}));
  auto* vocab = app.add_subcommand("vocab", "build word vocabularies and the char alphabet");
  add_common(vocab, common["vocab"], with(data_keys, {"vocab_cap", "char_onehot"}));
  auto* pretrain = app.add_subcommand("pretrain", "skip-gram word embeddings for both sides");
  add_common(pretrain, common["pretrain"],
             with(data_keys, {"word_dim", "sgns_window", "sgns_negatives", "sgns_epochs", "sgns_lr"}));
  auto* train = app.add_subcommand("train", "train the relevancy model");
  add_common(train, common["train"],
             with(with(data_keys, model_keys), {"checkpoint", "pretrained", "valid_pool"}));
  auto* evaluate = app.add_subcommand("evaluate", "Recall@k and MRR on test candidate pools");
  add_common(evaluate, common["evaluate"], with(data_keys, {"checkpoint", "report", "pool_size"}));
  EvalModes modes;
  evaluate->add_flag("--oracle", modes.oracle, "score with the answer key (sanity stub)");
  evaluate->add_flag("--inverted", modes.inverted, "score with the inverted answer key");
  evaluate->add_flag("--baseline", modes.baseline, "TF-IDF + logistic regression instead of a model");
  auto* recommend = app.add_subcommand("recommend", "top-k reviews from a bank for one diff");
  add_common(recommend, common["recommend"], with(data_keys, {"checkpoint"}));
  std::string diff, bank;
  std::size_t k = 10;
  recommend->add_option("--diff", diff, "diff hunk file")->required();
  recommend->add_option("--bank", bank, "JSONL review bank")->required();
  recommend->add_option("--k", k, "how many reviews")->check(CLI::PositiveNumber);
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check on the tiny config");
  add_common(gradcheck, common["gradcheck"], with(data_keys, {"ablation", "scorer"}));
  std::size_t seeds = 1;
  double tolerance = 1e-4;
  gradcheck->add_option("--seeds", seeds, "consecutive seeds to check")->check(CLI::PositiveNumber);
  gradcheck->add_option("--tolerance", tolerance, "max relative error");
  auto* lex = app.add_subcommand("lex", "print the tokens of a diff hunk");
  add_common(lex, common["lex"], {});
  std::string lex_diff;
  lex->add_option("--diff", lex_diff, "diff hunk file")->required();
  auto* fetch = app.add_subcommand("fetch", "download one pull request's review comments");
  add_common(fetch, common["fetch"], {});
  std::string repo, fetch_out;
  int pr = 0;
  corpus::FetchOptions fetch_opts;
  fetch->add_option("--repo", repo, "owner/name")->required();
  fetch->add_option("--pr", pr, "pull request number")->required();
  fetch->add_option("--out", fetch_out, "JSONL output")->required();
  fetch->add_option("--base-url", fetch_opts.base_url, "API root");
  fetch->add_option("--token", fetch_opts.token, "API token");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const Common& opts = common.at(name);
  Output out{opts.quiet, opts.json_out};
  try {
    cli::RunConfig rc = resolve_config(name, opts);
    if (name == "prepare") return cmd_prepare(rc, out);
    if (name == "vocab") return cmd_vocab(rc, out);
    if (name == "pretrain") return cmd_pretrain(rc, out);
    if (name == "train") return cmd_train(rc, out);
    if (name == "evaluate") return cmd_evaluate(rc, modes, out);
    if (name == "recommend") return cmd_recommend(rc, diff, bank, k, out);
    if (name == "gradcheck") return cmd_gradcheck(rc, seeds, tolerance, out);
    if (name == "lex") return cmd_lex(lex_diff, out);
    if (name == "fetch") return cmd_fetch(repo, pr, fetch_out, fetch_opts, out);
  } catch (const ConfigError& e) {
    std::cerr << "corerev " << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const CheckFailed& e) {
    std::cerr << "corerev " << name << ": " << e.what() << "\n";
    return kExitCheck;
  } catch (const std::exception& e) {
    std::cerr << "corerev " << name << ": " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
