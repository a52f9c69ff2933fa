#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lexinduce/alignment.hpp"
#include "lexinduce/corpus_io.hpp"
#include "lexinduce/corpus_kernels.hpp"
#include "lexinduce/error.hpp"
#include "lexinduce/kmeans.hpp"
#include "lexinduce/planted.hpp"
#include "lexinduce/training.hpp"
#include "manifest.hpp"

namespace lexinduce::cli {

namespace fs = std::filesystem;

namespace {

struct PriorFlags {
  std::string lexicon;
  std::string lexicon_mode = "divide_by_5";
  std::string spans;
  double lambda_c = 1.0;
  double lambda_v = 1.0;
  std::string placement = "non_root";
  std::string inference_priors = "on";
};

struct Options {
  std::string captions, labels, stopwords, alignments, mode = "coupling", out;
  std::string grammar, pred, gold_trees, gold_deps, pos, table;
  std::string valid_captions, valid_trees, valid_deps, vectors, manifest, emit_corpus;
  PriorFlags priors;
  int nonterminals = 15, preterminals = 20, epochs = 10, batch_size = 16, max_len = 20, min_count = 1;
  int eval_every = 0;
  double lr = 0.05, emission_smoothing = 0.0, kmeans_bonus = 1.0;
  std::uint64_t seed = 0;
  int seeds = 5, train_size = 150, valid_size = 50, corpus_size = 200;
};

std::string join(const std::vector<std::string>& v, const std::string& sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::map<std::string, std::string> resolved(const CLI::App* sub) {
  std::map<std::string, std::string> out;
  for (const auto* opt : sub->get_options()) {
    if (opt->get_name() == "--help") continue;
    out[opt->get_name()] = opt->count() ? join(opt->results()) : opt->get_default_str();
  }
  return out;
}

// Captions keyed by id, in file order.
struct Captions {
  std::vector<CorpusRecord> records;
  std::map<std::string, std::size_t> index;

  explicit Captions(const std::string& path) : records(read_corpus(path)) {
    for (std::size_t i = 0; i < records.size(); ++i) index[records[i].id] = i;
  }
  const CorpusRecord& at(const std::string& id, const std::string& source) const {
    auto it = index.find(id);
    if (it == index.end()) throw InputError(source + ": sentence id '" + id + "' not found in the captions");
    return records[it->second];
  }
};

std::map<std::string, LabelInput> labels_by_id(const std::string& path, const Captions& caps) {
  std::map<std::string, LabelInput> out;
  for (auto& l : read_labels(path)) {
    caps.at(l.sentence_id, path);
    out[l.sentence_id] = std::move(l);
  }
  for (const auto& r : caps.records)
    if (!out.count(r.id)) throw InputError(path + ": no labels for caption '" + r.id + "'");
  return out;
}

PriorBundle load_priors(const PriorFlags& f, const CLI::App* sub, const Captions* caps,
                        std::vector<std::string>& inputs) {
  PriorBundle b;
  const bool c_given = sub->count("--lambda-c") > 0, v_given = sub->count("--lambda-v") > 0;
  if (!f.lexicon.empty()) {
    inputs.push_back(f.lexicon);
    b.lexicon = std::make_shared<ConcretenessLexicon>(
        ConcretenessLexicon::load(f.lexicon, parse_normalization_mode(f.lexicon_mode)));
    b.lambda_c = f.lambda_c;
  } else if (c_given && f.lambda_c > 0) {
    throw ConfigError("--lambda-c > 0 needs --lexicon");
  }
  if (!f.spans.empty()) {
    inputs.push_back(f.spans);
    auto spans = RewardedSpanSet::load_jsonl(f.spans);
    if (caps) {
      for (const auto& [id, list] : spans.all()) {
        const auto& r = caps->at(id, f.spans);
        for (const auto& s : list)
          if (s.end >= static_cast<int>(r.tokens.size()))
            throw InputError(f.spans + ": span beyond the end of caption '" + id + "'");
      }
    }
    b.spans = std::make_shared<RewardedSpanSet>(std::move(spans));
    b.lambda_v = f.lambda_v;
  } else if (v_given && f.lambda_v > 0) {
    throw ConfigError("--lambda-v > 0 needs --spans");
  }
  b.placement = parse_placement(f.placement);
  b.inference_priors_enabled = f.inference_priors == "on";
  b.validate();
  return b;
}

void add_prior_flags(CLI::App* sub, PriorFlags& f) {
  sub->add_option("--lexicon", f.lexicon, "concreteness ratings TSV (lemma, 1..5)");
  sub->add_option("--lexicon-mode", f.lexicon_mode, "rating normalization")
      ->check(CLI::IsMember({"divide_by_5", "affine_1_5"}))
      ->capture_default_str();
  sub->add_option("--spans", f.spans, "rewarded spans JSON lines");
  sub->add_option("--lambda-c", f.lambda_c, "root concreteness weight (used with --lexicon)")
      ->check(CLI::Range(0.0, 10.0))
      ->capture_default_str();
  sub->add_option("--lambda-v", f.lambda_v, "rewarded span weight (used with --spans)")
      ->check(CLI::Range(0.0, 10.0))
      ->capture_default_str();
  sub->add_option("--placement", f.placement, "where the span potential fires")
      ->check(CLI::IsMember({"root", "non_root"}))
      ->capture_default_str();
  sub->add_option("--inference-priors", f.inference_priors, "apply priors when decoding")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
}

std::vector<Sentence> to_sentences(const std::vector<CorpusRecord>& records, const Vocabulary& vocab,
                                   const std::string& source) {
  std::vector<Sentence> out;
  for (const auto& r : records) {
    if (r.tokens.size() < 2)
      throw InputError(source + ": caption '" + r.id + "' has fewer than 2 tokens");
    out.push_back(Sentence::from_tokens(r.id, r.tokens, r.lemmas, vocab));
  }
  return out;
}

SpanSet nontrivial(const SpanSet& spans, int n) {
  SpanSet out;
  for (const auto& s : spans)
    if (s.second > s.first && !(s.first == 0 && s.second == n - 1)) out.insert(s);
  return out;
}

// Gold trees and dependencies aligned to `ids`: by id when the files carry
// ids, by position otherwise.
template <typename T>
std::vector<const T*> align_gold(const std::vector<T>& gold, const std::vector<std::string>& ids,
                                 const std::string& source) {
  std::vector<const T*> out;
  const bool keyed = !gold.empty() && gold.front().id.has_value();
  if (keyed) {
    std::map<std::string, const T*> by_id;
    for (const auto& g : gold) {
      if (!g.id) throw InputError(source + ": some entries carry sentence ids and some do not");
      by_id[*g.id] = &g;
    }
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw InputError(source + ": no gold entry for sentence '" + id + "'");
      out.push_back(it->second);
    }
  } else {
    if (gold.size() != ids.size())
      throw InputError(source + ": " + std::to_string(gold.size()) + " entries for " + std::to_string(ids.size()) +
                       " sentences");
    for (const auto& g : gold) out.push_back(&g);
  }
  return out;
}

ValidationSet load_validation(const Options& o, const Vocabulary& vocab, std::vector<std::string>& inputs) {
  ValidationSet v;
  if (o.valid_captions.empty()) return v;
  if (o.valid_trees.empty() || o.valid_deps.empty())
    throw ConfigError("--valid-captions needs --valid-trees and --valid-deps");
  inputs.insert(inputs.end(), {o.valid_captions, o.valid_trees, o.valid_deps});
  auto recs = read_corpus(o.valid_captions);
  v.sentences = to_sentences(recs, vocab, o.valid_captions);
  std::vector<std::string> ids;
  for (const auto& r : recs) ids.push_back(r.id);
  auto trees = read_trees(o.valid_trees);
  auto deps = read_dependencies(o.valid_deps);
  auto t = align_gold(trees, ids, o.valid_trees);
  auto d = align_gold(deps, ids, o.valid_deps);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const int n = static_cast<int>(recs[i].tokens.size());
    if (static_cast<int>(t[i]->tree.tokens.size()) != n || d[i]->parse.size() != n)
      throw InputError("validation gold for '" + recs[i].id + "' does not match its token count");
    v.gold_spans.push_back(nontrivial(t[i]->tree.spans, n));
    v.gold_deps.push_back(d[i]->parse);
  }
  return v;
}

class Command {
 public:
  Command(std::string name, std::vector<std::string> args, std::ostream& err)
      : name_(std::move(name)), args_(std::move(args)), err_(err) {}

  std::vector<std::string> inputs;

  void finish(const CLI::App* sub, const std::string& manifest_path) {
    RunManifest m;
    m.command = name_;
    m.args = args_;
    m.config = resolved(sub);
    auto seed = m.config.find("--seed");
    if (seed != m.config.end()) m.seed = seed->second;
    for (const auto& p : inputs) m.inputs[p] = sha256_file(p);
    m.save(manifest_path);
  }

  std::ostream& warn() { return err_ << "warning: "; }

 private:
  std::string name_;
  std::vector<std::string> args_;
  std::ostream& err_;
};

void cmd_align(const Options& o, Command& cmd) {
  cmd.inputs = {o.captions, o.labels, o.stopwords};
  Captions caps(o.captions);
  auto labels = labels_by_id(o.labels, caps);
  auto stop = load_stopwords(o.stopwords);
  std::vector<std::pair<CaptionRecord, LabelRecord>> kept;
  for (const auto& r : caps.records) {
    auto rec = preprocess({r.id, r.tokens, r.lemmas}, labels.at(r.id), stop);
    if (!rec) {
      cmd.warn() << "caption '" << r.id << "' is empty after stopword removal; skipped\n";
      continue;
    }
    kept.push_back(std::move(*rec));
  }
  auto cooc = build_cooc(kept);
  std::vector<AlignmentRecord> out;
  for (const auto& [c, l] : kept) out.push_back({c.sentence_id, competitive_link(c, l, cooc)});
  write_alignments(o.out, out);
}

void cmd_spans(const Options& o, Command& cmd) {
  cmd.inputs = {o.captions, o.labels, o.alignments};
  const SpanMode mode = parse_span_mode(o.mode);
  Captions caps(o.captions);
  auto labels = labels_by_id(o.labels, caps);
  RewardedSpanSet spans;
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& a : read_alignments(o.alignments)) {
    const auto& r = caps.at(a.sentence_id, o.alignments);
    if (!seen.insert(a.sentence_id).second)
      throw InputError(o.alignments + ": duplicate sentence id '" + a.sentence_id + "'");
    const auto& li = labels.at(a.sentence_id);
    CaptionRecord c{r.id, r.tokens, {}, {}};
    LabelRecord l{li.sentence_id, li.activity, li.participants};
    for (const auto& p : a.pairs)
      if (p.caption_position < 0 || p.caption_position >= static_cast<int>(r.tokens.size()) ||
          p.label_position < 0 || p.label_position > static_cast<int>(l.participants.size()))
        throw InputError(o.alignments + ": alignment position out of range for '" + r.id + "'");
    spans.ensure(r.id);
    for (const auto& s : generate_rewarded_spans(c, l, a.pairs, mode)) spans.add(r.id, s);
    order.push_back(r.id);
  }
  for (const auto& r : caps.records)
    if (!seen.count(r.id)) cmd.warn() << "caption '" << r.id << "' has no alignment record; no spans\n";
  spans.save_jsonl(o.out, order);
}

void cmd_train(const Options& o, const CLI::App* sub, Command& cmd, std::ostream& out) {
  cmd.inputs = {o.captions};
  auto recs = read_corpus(o.captions);
  std::vector<std::vector<std::string>> tokens;
  for (const auto& r : recs) tokens.push_back(r.tokens);
  auto vocab = Vocabulary::build(tokens, o.min_count);
  Captions caps(o.captions);
  auto priors = load_priors(o.priors, sub, &caps, cmd.inputs);

  std::vector<Sentence> corpus;
  for (const auto& r : recs) {
    if (r.tokens.size() < 2) {
      cmd.warn() << "caption '" << r.id << "' has fewer than 2 tokens; not used for training\n";
      continue;
    }
    corpus.push_back(Sentence::from_tokens(r.id, r.tokens, r.lemmas, vocab));
  }
  auto valid = load_validation(o, vocab, cmd.inputs);

  GrammarConfig gc;
  gc.num_nonterminals = o.nonterminals;
  gc.num_preterminals = o.preterminals;
  gc.seed = o.seed;
  gc.emission_smoothing = o.emission_smoothing;
  gc.validate();
  auto grammar = LexGrammar::new_random(gc, vocab);
  if (!o.vectors.empty()) {
    cmd.inputs.push_back(o.vectors);
    grammar = init_emissions_from_clusters(grammar, WordVectors::load_text(o.vectors), o.preterminals,
                                           o.kmeans_bonus, o.seed);
  }

  TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch_size;
  tc.learning_rate = o.lr;
  tc.lambda_c = priors.lambda_c;
  tc.lambda_v = priors.lambda_v;
  tc.placement = priors.placement;
  tc.seed = o.seed;
  tc.max_sentence_length = o.max_len;
  tc.checkpoint_dir = o.out;
  tc.eval_every = o.eval_every;
  tc.validate();

  fs::create_directories(o.out);
  auto result = train(corpus, grammar, priors, tc, valid.empty() ? nullptr : &valid);
  result.best.save((fs::path(o.out) / "grammar.json").string());
  const auto& best = result.history[result.best_index];
  out << "selected checkpoint: epoch " << best.epoch << ", batch " << best.batch << ", objective "
            << best.objective << "\n";
}

void cmd_parse(const Options& o, const CLI::App* sub, Command& cmd) {
  cmd.inputs = {o.grammar, o.captions};
  auto grammar = LexGrammar::load(o.grammar);
  Captions caps(o.captions);
  auto priors = load_priors(o.priors, sub, &caps, cmd.inputs);
  auto sentences = to_sentences(caps.records, grammar.vocab(), o.captions);
  auto ptrs = pointers(sentences);
  RuleScores scores(grammar);
  auto decoding = priors.for_decoding();
  auto best = viterbi_parallel(ptrs, scores, priors);
  auto logz = log_marginals_parallel(ptrs, scores, decoding);
  std::string text;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ParseRecord r;
    r.id = sentences[i].id;
    r.tree = to_bracketed(best[i].tree, sentences[i].surface, grammar.shape().nonterminals);
    r.heads = extract_dependencies(best[i].tree).head_of;
    r.log_marginal = logz[i];
    r.viterbi_score = best[i].score;
    text += parse_record_to_jsonl(r);
  }
  write_text(o.out, text);
}

void cmd_eval(const Options& o, Command& cmd, std::ostream& out) {
  cmd.inputs = {o.pred, o.gold_trees, o.gold_deps};
  auto pred = read_parses(o.pred);
  if (pred.empty()) throw InputError(o.pred + ": no parses");
  std::vector<std::string> ids;
  for (const auto& p : pred) ids.push_back(p.id);
  auto trees = read_trees(o.gold_trees);
  auto deps = read_dependencies(o.gold_deps);
  auto t = align_gold(trees, ids, o.gold_trees);
  auto d = align_gold(deps, ids, o.gold_deps);
  std::vector<const IdTags*> tags;
  std::vector<IdTags> pos;
  if (!o.pos.empty()) {
    cmd.inputs.push_back(o.pos);
    pos = read_pos(o.pos);
    tags = align_gold(pos, ids, o.pos);
  }

  std::vector<SpanSet> gs, ps;
  std::vector<DependencyParse> gd, pd;
  std::vector<std::vector<std::string>> tg;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int n = static_cast<int>(pred[i].heads.size());
    auto ptree = parse_bracketed(pred[i].tree);
    if (static_cast<int>(ptree.tokens.size()) != n)
      throw InputError(o.pred + ": tree and heads disagree on length for '" + ids[i] + "'");
    if (static_cast<int>(t[i]->tree.tokens.size()) != n || d[i]->parse.size() != n)
      throw InputError("gold annotation for '" + ids[i] + "' has a different token count");
    gs.push_back(nontrivial(t[i]->tree.spans, n));
    ps.push_back(nontrivial(ptree.spans, n));
    gd.push_back(d[i]->parse);
    pd.push_back(DependencyParse{pred[i].heads});
    if (!tags.empty()) {
      if (static_cast<int>(tags[i]->tags.size()) != n)
        throw InputError(o.pos + ": tag count differs for '" + ids[i] + "'");
      tg.push_back(tags[i]->tags);
    }
  }
  auto report = evaluate(gs, ps, gd, pd, tg);
  write_text(o.out, report.to_json());
  if (!o.table.empty()) write_text(o.table, report.to_table());
  out << report.to_table();
}

void emit_planted_corpus(const Options& o) {
  fs::create_directories(o.emit_corpus);
  auto corpus = sample_planted_corpus(o.corpus_size, o.seed, "c");
  auto dir = fs::path(o.emit_corpus);
  std::vector<CorpusRecord> recs;
  std::vector<LabelInput> labels;
  std::vector<IdDependencies> deps;
  std::vector<IdTags> pos;
  std::string trees, ratings;
  for (const auto& s : corpus.sentences) {
    recs.push_back({s.id, s.tokens, s.lemmas});
    labels.push_back(s.labels);
    deps.push_back({s.id, s.tokens, extract_dependencies(s.tree)});
    pos.push_back({s.id, s.tokens, s.tags});
    trees += s.id + "\t" + gold_bracketed(s) + "\n";
  }
  std::ostringstream r;
  for (const auto& [lemma, raw] : corpus.ratings) r << lemma << '\t' << raw << '\n';
  write_corpus((dir / "captions.tsv").string(), recs);
  write_labels((dir / "labels.jsonl").string(), labels);
  write_text((dir / "gold_trees.txt").string(), trees);
  write_dependencies((dir / "gold_deps.tsv").string(), deps);
  write_pos((dir / "pos.tsv").string(), pos);
  write_text((dir / "concreteness.tsv").string(), r.str());
}

void cmd_synth(const Options& o, std::ostream& out) {
  if (!o.emit_corpus.empty()) {
    emit_planted_corpus(o);
    return;
  }
  PlantedConfig pc;
  pc.num_seeds = o.seeds;
  pc.base_seed = o.seed;
  pc.train_sentences = o.train_size;
  pc.valid_sentences = o.valid_size;
  pc.nonterminals = o.nonterminals;
  pc.preterminals = o.preterminals;
  pc.epochs = o.epochs;
  pc.batch_size = o.batch_size;
  pc.learning_rate = o.lr;
  pc.lambda_c = o.priors.lambda_c;
  auto report = planted_grammar_experiment(pc);
  write_text(o.out, report.to_json());
  out << report.to_table();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lexicalized grammar induction with visual priors", "lexinduce"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* align = app.add_subcommand("align", "Dice alignment between caption words and image labels");
  align->add_option("--captions", o.captions)->required()->check(CLI::ExistingFile);
  align->add_option("--labels", o.labels)->required()->check(CLI::ExistingFile);
  align->add_option("--stopwords", o.stopwords)->required()->check(CLI::ExistingFile);
  align->add_option("--out", o.out)->required();

  auto* spans = app.add_subcommand("spans", "rewarded spans from alignments");
  spans->add_option("--captions", o.captions)->required()->check(CLI::ExistingFile);
  spans->add_option("--labels", o.labels)->required()->check(CLI::ExistingFile);
  spans->add_option("--alignments", o.alignments)->required()->check(CLI::ExistingFile);
  spans->add_option("--mode", o.mode)->check(CLI::IsMember({"coupling", "combined"}))->capture_default_str();
  spans->add_option("--out", o.out)->required();

  auto* trn = app.add_subcommand("train", "gradient ascent on the corpus objective");
  trn->add_option("--captions", o.captions)->required()->check(CLI::ExistingFile);
  add_prior_flags(trn, o.priors);
  trn->add_option("--nonterminals", o.nonterminals)->check(CLI::PositiveNumber)->capture_default_str();
  trn->add_option("--preterminals", o.preterminals)->check(CLI::PositiveNumber)->capture_default_str();
  trn->add_option("--epochs", o.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  trn->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  trn->add_option("--lr", o.lr)->check(CLI::NonNegativeNumber)->capture_default_str();
  trn->add_option("--seed", o.seed)->capture_default_str();
  trn->add_option("--max-len", o.max_len)->check(CLI::Range(2, 1000))->capture_default_str();
  trn->add_option("--min-count", o.min_count)->check(CLI::PositiveNumber)->capture_default_str();
  trn->add_option("--eval-every", o.eval_every)->check(CLI::NonNegativeNumber)->capture_default_str();
  trn->add_option("--emission-smoothing", o.emission_smoothing)->check(CLI::NonNegativeNumber)->capture_default_str();
  trn->add_option("--vectors", o.vectors, "word vectors (text format) for k-means emission init")
      ->check(CLI::ExistingFile);
  trn->add_option("--kmeans-bonus", o.kmeans_bonus)->capture_default_str();
  trn->add_option("--valid-captions", o.valid_captions)->check(CLI::ExistingFile);
  trn->add_option("--valid-trees", o.valid_trees)->check(CLI::ExistingFile);
  trn->add_option("--valid-deps", o.valid_deps)->check(CLI::ExistingFile);
  trn->add_option("--out", o.out, "output directory")->required();

  auto* prs = app.add_subcommand("parse", "Viterbi parses as JSON lines");
  prs->add_option("--grammar", o.grammar)->required()->check(CLI::ExistingFile);
  prs->add_option("--captions", o.captions)->required()->check(CLI::ExistingFile);
  add_prior_flags(prs, o.priors);
  prs->add_option("--out", o.out)->required();

  auto* ev = app.add_subcommand("eval", "span F1 and attachment scores");
  ev->add_option("--pred", o.pred)->required()->check(CLI::ExistingFile);
  ev->add_option("--gold-trees", o.gold_trees)->required()->check(CLI::ExistingFile);
  ev->add_option("--gold-deps", o.gold_deps)->required()->check(CLI::ExistingFile);
  ev->add_option("--pos", o.pos)->check(CLI::ExistingFile);
  ev->add_option("--table", o.table, "also write the text table here");
  ev->add_option("--out", o.out)->required();

  auto* syn = app.add_subcommand("synth", "planted-grammar experiment, or emit a planted corpus");
  syn->add_option("--seeds", o.seeds)->check(CLI::PositiveNumber)->capture_default_str();
  syn->add_option("--seed", o.seed)->capture_default_str();
  syn->add_option("--train-size", o.train_size)->check(CLI::PositiveNumber)->capture_default_str();
  syn->add_option("--valid-size", o.valid_size)->check(CLI::PositiveNumber)->capture_default_str();
  syn->add_option("--nonterminals", o.nonterminals)->check(CLI::PositiveNumber);
  syn->add_option("--preterminals", o.preterminals)->check(CLI::PositiveNumber);
  syn->add_option("--epochs", o.epochs)->check(CLI::PositiveNumber);
  syn->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber);
  syn->add_option("--lr", o.lr)->check(CLI::NonNegativeNumber);
  syn->add_option("--lambda-c", o.priors.lambda_c)->check(CLI::Range(0.0, 10.0));
  syn->add_option("--emit-corpus", o.emit_corpus, "write a planted caption corpus to this directory");
  syn->add_option("--size", o.corpus_size, "sentences for --emit-corpus")->capture_default_str();
  syn->add_option("--out", o.out, "report JSON");

  auto* rerun = app.add_subcommand("rerun", "replay a command from its manifest");
  rerun->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*rerun) {
      auto m = RunManifest::load(o.manifest);
      if (m.tool_version != kToolVersion)
        throw ConfigError("manifest written by version " + m.tool_version + ", this is " + kToolVersion);
      m.verify_inputs();
      return run(m.args, out, err);
    }
    CLI::App* sub = app.get_subcommands().front();
    Command cmd(sub->get_name(), args, err);
    std::string manifest = o.out + ".manifest.json";
    if (*align) {
      cmd_align(o, cmd);
    } else if (*spans) {
      cmd_spans(o, cmd);
    } else if (*trn) {
      cmd_train(o, trn, cmd, out);
      manifest = (fs::path(o.out) / "manifest.json").string();
    } else if (*prs) {
      cmd_parse(o, prs, cmd);
    } else if (*ev) {
      cmd_eval(o, cmd, out);
    } else if (*syn) {
      if (!o.emit_corpus.empty()) {
        manifest = (fs::path(o.emit_corpus) / "manifest.json").string();
      } else {
        if (o.out.empty()) throw ConfigError("synth needs --out or --emit-corpus");
        if (!syn->count("--nonterminals")) o.nonterminals = PlantedConfig{}.nonterminals;
        if (!syn->count("--preterminals")) o.preterminals = PlantedConfig{}.preterminals;
        if (!syn->count("--epochs")) o.epochs = PlantedConfig{}.epochs;
        if (!syn->count("--batch-size")) o.batch_size = PlantedConfig{}.batch_size;
        if (!syn->count("--lr")) o.lr = PlantedConfig{}.learning_rate;
        if (!syn->count("--lambda-c")) o.priors.lambda_c = PlantedConfig{}.lambda_c;
      }
      cmd_synth(o, out);
    }
    cmd.finish(sub, manifest);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lexinduce::cli
