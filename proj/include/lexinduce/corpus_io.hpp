#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexinduce/alignment.hpp"
#include "lexinduce/tree.hpp"

namespace lexinduce {

// "id<TAB>tokens<TAB>lemmas", space-separated columns.
struct CorpusRecord {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;
};

std::vector<CorpusRecord> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records);

// {"sentence_id", "activity", "participants": [...]}; a participant may be a
// plain string, "role=value", or {"role": ..., "value": ...}. Null or empty
// values are unfilled roles and are dropped.
std::vector<LabelInput> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<LabelInput>& labels);

struct AlignmentRecord {
  std::string sentence_id;
  std::vector<AlignmentPair> pairs;
};

std::string alignment_to_jsonl(const AlignmentRecord& record);
void write_alignments(const std::string& path, const std::vector<AlignmentRecord>& records);
std::vector<AlignmentRecord> read_alignments(const std::string& path);

// Any labelled bracketing works: "(S (NP (D a) (N dog)) (V runs))". Leaves are
// the innermost "(tag word)" pairs; a bare word also counts as a leaf.
struct BracketedTree {
  std::vector<std::string> tokens;
  SpanSet spans;  // every constituent, leaves and root included
};

BracketedTree parse_bracketed(std::string_view text);

struct IdTree {
  std::optional<std::string> id;
  BracketedTree tree;
};

// One tree per line, optionally prefixed by "id<TAB>".
std::vector<IdTree> read_trees(const std::string& path);

// Blocks separated by blank lines; rows are "index<TAB>token<TAB>head" with
// 1-based indices and head 0 for ROOT. "# sentence_id = X" names a block.
struct IdDependencies {
  std::optional<std::string> id;
  std::vector<std::string> tokens;
  DependencyParse parse;
};

std::vector<IdDependencies> read_dependencies(const std::string& path);
void write_dependencies(const std::string& path, const std::vector<IdDependencies>& blocks);

// Blocks of "token<TAB>tag" rows, same block conventions.
struct IdTags {
  std::optional<std::string> id;
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

std::vector<IdTags> read_pos(const std::string& path);
void write_pos(const std::string& path, const std::vector<IdTags>& blocks);

// Parser output, one JSON object per line. Heads are 0-based with -1 for ROOT.
struct ParseRecord {
  std::string id;
  std::string tree;
  std::vector<int> heads;
  double log_marginal = 0.0;
  double viterbi_score = 0.0;
};

std::string parse_record_to_jsonl(const ParseRecord& record);
std::vector<ParseRecord> read_parses(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace lexinduce
