#include "hlyap/group.hpp"

#include "hlyap/error.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hlyap::projlin {
namespace {

bool close_to_identity(const Matrix& m) {
  return (m - Matrix::Identity(m.rows(), m.cols())).norm() <= 1e-9 * static_cast<double>(m.rows());
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix parse_matrix(const nlohmann::json& j, int dim) {
  Matrix m(dim, dim);
  if (!j.is_array()) throw Error(ErrorCode::malformed_input, "generator must be an array");
  if (static_cast<int>(j.size()) == dim * dim && !j.empty() && j.front().is_number()) {
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = j.at(r * dim + c).get<double>();
    return m;
  }
  if (static_cast<int>(j.size()) != dim) throw Error(ErrorCode::malformed_input, "generator has wrong row count");
  for (int r = 0; r < dim; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw Error(ErrorCode::malformed_input, "generator row has wrong length");
    }
    for (int c = 0; c < dim; ++c) {
      if (!row.at(c).is_number()) throw Error(ErrorCode::malformed_input, "generator entry is not a number");
      m(r, c) = row.at(c).get<double>();
    }
  }
  return m;
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Group::Group(std::vector<Matrix> generators, std::vector<std::string> labels, std::string name)
    : name_(std::move(name)), labels_(std::move(labels)) {
  if (generators.empty()) throw Error(ErrorCode::invalid_argument, "group needs at least one generator");
  dim_ = static_cast<int>(generators.front().rows());
  if (dim_ < 2) throw Error(ErrorCode::invalid_argument, "group dimension must be >= 2");
  if (labels_.empty()) {
    for (std::size_t i = 0; i < generators.size(); ++i) labels_.push_back(std::string(1, static_cast<char>('a' + i)));
  }
  if (labels_.size() != generators.size()) throw Error(ErrorCode::invalid_argument, "one label per generator");
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].rows() != dim_ || generators[i].cols() != dim_) {
      throw Error(ErrorCode::invalid_argument, "generators must share one square size");
    }
    const int letter = static_cast<int>(i) + 1;
    auto g = normalize_unimodular(generators[i]).with_word(Word{letter});
    const bool inv = close_to_identity(g.matrix() * g.matrix());
    generators_.push_back(std::move(g));
    involution_.push_back(inv);
    letters_.push_back(letter);
    if (!inv) letters_.push_back(-letter);
  }
  chart_ = AffineChart::standard(dim_ - 1);
}

Group Group::from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::malformed_input, "group file must be a JSON object");
    const int dim = j.at("dim").get<int>();
    if (dim < 2) throw Error(ErrorCode::malformed_input, "dim must be >= 2");
    std::vector<Matrix> gens;
    for (const auto& g : j.at("generators")) gens.push_back(parse_matrix(g, dim));
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    std::string name = j.value("name", std::string{});
    return Group(std::move(gens), std::move(labels), std::move(name));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed group file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::malformed_input) throw;
    throw Error(ErrorCode::malformed_input, std::string("invalid group: ") + e.what());
  }
}

Group Group::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::malformed_input, "cannot open group file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed group file: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json Group::to_json() const {
  nlohmann::json j;
  if (!name_.empty()) j["name"] = name_;
  j["dim"] = dim_;
  j["labels"] = labels_;
  auto gens = nlohmann::json::array();
  for (const auto& g : generators_) {
    auto rows = nlohmann::json::array();
    for (int r = 0; r < dim_; ++r) {
      auto row = nlohmann::json::array();
      for (int c = 0; c < dim_; ++c) row.push_back(g.matrix()(r, c));
      rows.push_back(row);
    }
    gens.push_back(rows);
  }
  j["generators"] = gens;
  return j;
}

Word Group::canonical(const Word& w) const {
  Word out;
  for (int x : w) {
    if (x == 0 || std::abs(x) > rank()) throw Error(ErrorCode::invalid_argument, "letter out of range");
    if (x < 0 && involution_[-x - 1]) x = -x;
    const bool cancels = !out.empty() && (out.back() == -x || (x > 0 && involution_[x - 1] && out.back() == x));
    if (cancels) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

GroupElement Group::element(const Word& w) const {
  GroupElement e = GroupElement::identity(dim_);
  for (int x : w) {
    if (x == 0 || std::abs(x) > rank()) throw Error(ErrorCode::invalid_argument, "letter out of range");
    const auto& g = generators_[std::abs(x) - 1];
    e = e * (x > 0 ? g : g.inverse());
  }
  return e.with_word(canonical(w));
}

std::string Group::letter_label(int letter) const {
  const std::string& base = labels_[std::abs(letter) - 1];
  if (letter > 0 || involution_[-letter - 1]) return base;
  if (base.size() == 1 && std::islower(static_cast<unsigned char>(base[0]))) {
    return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(base[0]))));
  }
  return base + "^-1";
}

std::string Group::format_word(const Word& w) const {
  std::string out;
  for (int x : w) out += letter_label(x);
  return out.empty() ? std::string("e") : out;
}

Word Group::parse_word(std::string_view text) const {
  Word out;
  if (text == "e") return out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int best = 0;
    std::size_t best_len = 0;
    for (int i = 1; i <= rank(); ++i) {
      const std::string inverse_forms[] = {letter_label(-i), labels_[i - 1] + "^-1"};
      for (int letter : {i, -i}) {
        for (const auto& lab : letter > 0 ? std::vector<std::string>{labels_[i - 1]}
                                          : std::vector<std::string>(std::begin(inverse_forms), std::end(inverse_forms))) {
          if (lab.size() > best_len && text.substr(pos, lab.size()) == lab) {
            best = letter;
            best_len = lab.size();
          }
        }
      }
    }
    if (best == 0) {
      throw Error(ErrorCode::malformed_input, "unknown word label '" + std::string(text) + "'");
    }
    out.push_back(best);
    pos += best_len;
  }
  return canonical(out);
}

void Group::for_each_reduced(int max_len, const std::function<void(const GroupElement&)>& visit) const {
  for_each_reduced_while(max_len, [&](const GroupElement& g) {
    visit(g);
    return true;
  });
}

bool Group::for_each_reduced_while(int max_len, const std::function<bool(const GroupElement&)>& visit) const {
  std::vector<GroupElement> frontier{GroupElement::identity(dim_)};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<GroupElement> next;
    for (const auto& e : frontier) {
      const Word& w = *e.word();
      for (int x : letters_) {
        if (!w.empty()) {
          const int last = w.back();
          if (last == -x) continue;
          if (x > 0 && involution_[x - 1] && last == x) continue;
        }
        const auto& g = generators_[std::abs(x) - 1];
        GroupElement step = e * (x > 0 ? g : g.inverse());
        Word nw = w;
        nw.push_back(x);
        step = step.with_word(std::move(nw));
        if (!visit(step)) return false;
        if (len < max_len) next.push_back(std::move(step));
      }
    }
    frontier = std::move(next);
  }
  return true;
}

std::vector<GroupElement> Group::reduced_elements(int max_len) const {
  std::vector<GroupElement> out;
  for_each_reduced(max_len, [&](const GroupElement& e) { out.push_back(e); });
  return out;
}

std::string Group::hash() const {
  std::ostringstream s;
  s << dim_;
  for (const auto& g : generators_) {
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) s << ',' << format_double(g.matrix()(r, c));
    s << ';';
  }
  return fnv1a_hex(s.str());
}

}  // namespace hlyap::projlin
