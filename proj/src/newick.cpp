#include "tbrkit/newick.hpp"

#include <cctype>
#include <fstream>
#include <functional>

namespace tbrkit {

namespace {

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PhyloTree parse() {
    skip_space();
    subtree(true);
    skip_space();
    if (peek() == ':') branch_length();
    skip_space();
    expect(';');
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    try {
      return PhyloTree::from_graph(labels_, edges_);
    } catch (const NewickError&) {
      throw;
    } catch (const TreeError& e) {
      throw NewickError(e.what(), pos_);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw NewickError(what, pos_); }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    if (pos_ >= text_.size()) fail(c == ')' ? "unbalanced parentheses" : std::string("expected '") + c + "'");
    if (text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string label() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void branch_length() {
    expect(':');
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' || text_[pos_] == '+' || text_[pos_] == '-'))
      ++pos_;
    if (start == pos_) fail("missing branch length");
  }

  int new_vertex(std::string name) {
    labels_.push_back(std::move(name));
    return static_cast<int>(labels_.size()) - 1;
  }

  int subtree(bool is_root) {
    skip_space();
    if (++depth_ > kMaxDepth) fail("nesting too deep");
    int v;
    if (peek() == '(') {
      ++pos_;
      v = new_vertex("");
      int children = 0;
      while (true) {
        int child = subtree(false);
        edges_.push_back({v, child});
        ++children;
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
      if (is_root ? (children < 2 || children > 3) : children != 2)
        fail("vertex with " + std::to_string(children) + " children");
      skip_space();
      label();  // internal labels are ignored
    } else {
      std::string name = label();
      if (name.empty()) fail("empty leaf label");
      v = new_vertex(std::move(name));
    }
    skip_space();
    if (!is_root && peek() == ':') branch_length();
    --depth_;
    return v;
  }

  static constexpr int kMaxDepth = 10000;
  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
};

void write_subtree(const PhyloTree& t, Vertex v, std::string& out) {
  if (t.is_leaf(v)) {
    out += t.label(v);
    return;
  }
  out += '(';
  auto nb = t.neighbors(v);
  for (std::size_t i = 1; i < nb.size(); ++i) {
    if (i > 1) out += ',';
    write_subtree(t, nb[i], out);
  }
  out += ')';
}

}  // namespace

bool is_valid_label(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label)
    if (!is_label_char(c)) return false;
  return true;
}

PhyloTree parse_newick(std::string_view text) { return Parser(text).parse(); }

std::string write_newick(const PhyloTree& tree) {
  const int n = static_cast<int>(tree.num_taxa());
  if (n == 1) return tree.label(0) + ";";
  if (n == 2) return "(" + tree.label(0) + "," + tree.label(1) + ");";
  std::string out = "(";
  Vertex root = tree.parent(0);
  auto nb = tree.neighbors(root);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    if (i > 0) out += ',';
    write_subtree(tree, nb[i], out);
  }
  out += ");";
  return out;
}

std::vector<PhyloTree> read_newick_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<PhyloTree> trees;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    trees.push_back(parse_newick(line));
  }
  return trees;
}

TreePair read_tree_pair(const std::filesystem::path& path) {
  auto trees = read_newick_file(path);
  if (trees.size() < 2) throw std::runtime_error(path.string() + ": expected two trees");
  TreePair pair{std::move(trees[0]), std::move(trees[1])};
  require_same_taxa(pair);
  return pair;
}

}  // namespace tbrkit
