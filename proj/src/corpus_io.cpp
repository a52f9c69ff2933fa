#include "lexinduce/corpus_io.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexinduce/error.hpp"

namespace lexinduce {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = s.find('\t', start);
    out.push_back(s.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::ifstream open_in(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot read ") + what + ": " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

int parse_int(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw InputError(where + "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw InputError(where + "expected an integer, got '" + s + "'");
  return v;
}

// Reads blank-line separated blocks; hands each row and the optional id to
// `row`, and calls `flush` at every block end.
template <typename Row, typename Flush>
void read_blocks(const std::string& path, const char* what, Row row, Flush flush) {
  auto in = open_in(path, what);
  std::string line;
  int lineno = 0;
  bool open = false;
  std::optional<std::string> id;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) {
      if (open) flush(id);
      open = false;
      id.reset();
      continue;
    }
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (line.find("sentence_id") != std::string::npos && eq != std::string::npos) {
        auto v = split_ws(line.substr(eq + 1));
        if (v.size() == 1) id = v[0];
      }
      continue;
    }
    open = true;
    row(split_tabs(line), path + ":" + std::to_string(lineno) + ": ");
  }
  if (open) flush(id);
}

}  // namespace

std::vector<CorpusRecord> read_corpus(const std::string& path) {
  auto in = open_in(path, "corpus");
  std::vector<CorpusRecord> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) continue;
    const auto where = path + ":" + std::to_string(lineno) + ": ";
    auto cols = split_tabs(line);
    if (cols.size() != 3) throw InputError(where + "expected id<TAB>tokens<TAB>lemmas");
    CorpusRecord r{cols[0], split_ws(cols[1]), split_ws(cols[2])};
    if (r.id.empty()) throw InputError(where + "empty sentence id");
    if (r.tokens.empty()) throw InputError(where + "no tokens");
    if (r.tokens.size() != r.lemmas.size())
      throw InputError(where + std::to_string(r.tokens.size()) + " tokens but " +
                       std::to_string(r.lemmas.size()) + " lemmas");
    if (!seen.insert(r.id).second) throw InputError(where + "duplicate sentence id " + r.id);
    out.push_back(std::move(r));
  }
  return out;
}

void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records) {
  auto out = open_out(path);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s;
  };
  for (const auto& r : records) out << r.id << '\t' << join(r.tokens) << '\t' << join(r.lemmas) << '\n';
}

std::vector<LabelInput> read_labels(const std::string& path) {
  auto in = open_in(path, "labels");
  std::vector<LabelInput> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) continue;
    const auto where = path + ":" + std::to_string(lineno) + ": ";
    LabelInput l;
    try {
      auto j = json::parse(line);
      l.sentence_id = j.at("sentence_id").get<std::string>();
      l.activity = j.at("activity").get<std::string>();
      for (const auto& p : j.value("participants", json::array())) {
        std::string v;
        if (p.is_null()) continue;
        if (p.is_string()) {
          v = p.get<std::string>();
          auto eq = v.find('=');
          if (eq != std::string::npos) v = v.substr(eq + 1);
        } else if (p.is_object()) {
          if (!p.contains("value") || p["value"].is_null()) continue;
          v = p["value"].get<std::string>();
        } else {
          throw InputError(where + "participant must be a string or {role, value} object");
        }
        if (!v.empty()) l.participants.push_back(v);
      }
    } catch (const json::exception& e) {
      throw InputError(where + e.what());
    }
    if (l.activity.empty()) throw InputError(where + "empty activity");
    if (!seen.insert(l.sentence_id).second) throw InputError(where + "duplicate sentence id " + l.sentence_id);
    out.push_back(std::move(l));
  }
  return out;
}

void write_labels(const std::string& path, const std::vector<LabelInput>& labels) {
  auto out = open_out(path);
  for (const auto& l : labels) {
    ordered_json j;
    j["sentence_id"] = l.sentence_id;
    j["activity"] = l.activity;
    j["participants"] = l.participants;
    out << j.dump() << '\n';
  }
}

std::string alignment_to_jsonl(const AlignmentRecord& record) {
  ordered_json j;
  j["sentence_id"] = record.sentence_id;
  j["pairs"] = ordered_json::array();
  for (const auto& p : record.pairs) {
    ordered_json q;
    q["caption"] = p.caption_token;
    q["label"] = p.label_token;
    q["score"] = p.dice_score;
    q["caption_pos"] = p.caption_position;
    q["label_idx"] = p.label_position;
    j["pairs"].push_back(q);
  }
  return j.dump() + "\n";
}

void write_alignments(const std::string& path, const std::vector<AlignmentRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << alignment_to_jsonl(r);
}

std::vector<AlignmentRecord> read_alignments(const std::string& path) {
  auto in = open_in(path, "alignments");
  std::vector<AlignmentRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) continue;
    try {
      auto j = json::parse(line);
      AlignmentRecord r;
      r.sentence_id = j.at("sentence_id").get<std::string>();
      for (const auto& q : j.at("pairs")) {
        AlignmentPair p;
        p.caption_token = q.at("caption").get<std::string>();
        p.label_token = q.at("label").get<std::string>();
        p.dice_score = q.at("score").get<double>();
        p.caption_position = q.at("caption_pos").get<int>();
        p.label_position = q.at("label_idx").get<int>();
        r.pairs.push_back(std::move(p));
      }
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

BracketedTree parse_bracketed(std::string_view text) {
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      toks.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && text[j] != '(' && text[j] != ')' &&
             !std::isspace(static_cast<unsigned char>(text[j])))
        ++j;
      toks.emplace_back(text.substr(i, j - i));
      i = j;
    }
  }

  BracketedTree out;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw FormatError("bracketed tree: " + msg + " near token " + std::to_string(pos));
  };
  // Returns the covered [start, end] of the node at `pos`.
  std::function<Span()> node = [&]() -> Span {
    if (pos >= toks.size()) fail("unexpected end");
    if (toks[pos] != "(") {
      int i = static_cast<int>(out.tokens.size());
      out.tokens.push_back(toks[pos++]);
      out.spans.insert({i, i});
      return {i, i};
    }
    ++pos;
    if (pos < toks.size() && toks[pos] != "(" && toks[pos] != ")") ++pos;  // label
    int start = -1, end = -1;
    while (pos < toks.size() && toks[pos] != ")") {
      Span s = node();
      if (start < 0) start = s.first;
      end = s.second;
    }
    if (pos >= toks.size()) fail("unbalanced parentheses");
    ++pos;
    if (start < 0) fail("empty constituent");
    out.spans.insert({start, end});
    return {start, end};
  };
  node();
  if (pos != toks.size()) fail("trailing material");
  return out;
}

std::vector<IdTree> read_trees(const std::string& path) {
  auto in = open_in(path, "trees");
  std::vector<IdTree> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) continue;
    IdTree t;
    auto tab = line.find('\t');
    std::string body = line;
    if (tab != std::string::npos) {
      t.id = line.substr(0, tab);
      body = line.substr(tab + 1);
    }
    try {
      t.tree = parse_bracketed(body);
    } catch (const FormatError& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<IdDependencies> read_dependencies(const std::string& path) {
  std::vector<IdDependencies> out;
  IdDependencies cur;
  std::vector<int> heads;
  read_blocks(
      path, "dependencies",
      [&](const std::vector<std::string>& cols, const std::string& where) {
        if (cols.size() < 3) throw InputError(where + "expected index<TAB>token<TAB>head");
        int idx = parse_int(cols[0], where);
        if (idx != static_cast<int>(cur.tokens.size()) + 1)
          throw InputError(where + "token index " + cols[0] + " out of sequence");
        cur.tokens.push_back(cols[1]);
        heads.push_back(parse_int(cols[2], where));
      },
      [&](const std::optional<std::string>& id) {
        const int n = static_cast<int>(heads.size());
        cur.id = id;
        for (int h : heads) {
          if (h < 0 || h > n)
            throw InputError(path + ": head " + std::to_string(h) + " outside sentence of length " +
                             std::to_string(n));
          cur.parse.head_of.push_back(h == 0 ? DependencyParse::kRoot : h - 1);
        }
        if (!cur.parse.is_tree())
          throw InputError(path + ": block " + std::to_string(out.size() + 1) + " is not a tree");
        out.push_back(std::move(cur));
        cur = {};
        heads.clear();
      });
  return out;
}

void write_dependencies(const std::string& path, const std::vector<IdDependencies>& blocks) {
  auto out = open_out(path);
  for (const auto& b : blocks) {
    if (b.id) out << "# sentence_id = " << *b.id << '\n';
    for (int i = 0; i < b.parse.size(); ++i) {
      int h = b.parse.head_of[i];
      out << i + 1 << '\t' << b.tokens.at(i) << '\t' << (h == DependencyParse::kRoot ? 0 : h + 1) << '\n';
    }
    out << '\n';
  }
}

std::vector<IdTags> read_pos(const std::string& path) {
  std::vector<IdTags> out;
  IdTags cur;
  read_blocks(
      path, "POS reference",
      [&](const std::vector<std::string>& cols, const std::string& where) {
        if (cols.size() != 2) throw InputError(where + "expected token<TAB>tag");
        cur.tokens.push_back(cols[0]);
        cur.tags.push_back(cols[1]);
      },
      [&](const std::optional<std::string>& id) {
        cur.id = id;
        out.push_back(std::move(cur));
        cur = {};
      });
  return out;
}

void write_pos(const std::string& path, const std::vector<IdTags>& blocks) {
  auto out = open_out(path);
  for (const auto& b : blocks) {
    if (b.id) out << "# sentence_id = " << *b.id << '\n';
    for (std::size_t i = 0; i < b.tokens.size(); ++i) out << b.tokens[i] << '\t' << b.tags.at(i) << '\n';
    out << '\n';
  }
}

std::string parse_record_to_jsonl(const ParseRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["tree"] = record.tree;
  j["heads"] = record.heads;
  j["log_marginal"] = record.log_marginal;
  j["viterbi_score"] = record.viterbi_score;
  return j.dump() + "\n";
}

std::vector<ParseRecord> read_parses(const std::string& path) {
  auto in = open_in(path, "parses");
  std::vector<ParseRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (is_blank(line)) continue;
    try {
      auto j = json::parse(line);
      ParseRecord r;
      r.id = j.at("id").get<std::string>();
      r.tree = j.at("tree").get<std::string>();
      r.heads = j.at("heads").get<std::vector<int>>();
      r.log_marginal = j.at("log_marginal").get<double>();
      r.viterbi_score = j.at("viterbi_score").get<double>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
}

std::string read_text(const std::string& path) {
  auto in = open_in(path, "file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lexinduce
