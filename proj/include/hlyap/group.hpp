#pragma once

#include "hlyap/projlin.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hlyap::projlin {

/// A finitely generated matrix group given by normalized generators.
///
/// Words are enumerated over the alphabet (g_1, g_1^{-1}, g_2, g_2^{-1}, ...);
/// generators that are involutions contribute a single self-inverse letter.
/// Word matrices multiply left to right: w = g_{w_1} g_{w_2} ... g_{w_k}.
class Group {
 public:
  Group(std::vector<Matrix> generators, std::vector<std::string> labels, std::string name = {});

  /// Parses {"dim": n+1, "generators": [...], "labels": [...]}; generators may
  /// be nested rows or flat row-major arrays. Throws ErrorCode::malformed_input.
  static Group from_json(const nlohmann::json& j);
  static Group load(const std::string& path);
  nlohmann::json to_json() const;

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return static_cast<int>(generators_.size()); }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const GroupElement& generator(int i) const { return generators_.at(i); }
  bool is_involution(int i) const { return involution_.at(i); }
  /// Chart in which limit sets and domains of this group are expressed.
  const AffineChart& chart() const noexcept { return chart_; }

  /// Enumeration alphabet in lexicographic order.
  const std::vector<int>& letters() const noexcept { return letters_; }

  Word canonical(const Word& w) const;
  GroupElement element(const Word& w) const;

  std::string format_word(const Word& w) const;
  /// Greedy longest-match over labels and inverse labels ("a", "A" or "a^-1").
  /// Throws ErrorCode::malformed_input for unknown letters.
  Word parse_word(std::string_view text) const;

  /// Visits every reduced word of length 1..max_len breadth-first, in
  /// lexicographic order within each length, with its element.
  void for_each_reduced(int max_len, const std::function<void(const GroupElement&)>& visit) const;
  /// Same order; stops as soon as `visit` returns false and then returns false.
  bool for_each_reduced_while(int max_len, const std::function<bool(const GroupElement&)>& visit) const;
  std::vector<GroupElement> reduced_elements(int max_len) const;

  /// Stable hex digest of the normalized generator data.
  std::string hash() const;

 private:
  std::string letter_label(int letter) const;

  int dim_ = 0;
  std::string name_;
  std::vector<GroupElement> generators_;
  std::vector<std::string> labels_;
  std::vector<bool> involution_;
  std::vector<int> letters_;
  AffineChart chart_;
};

/// 64-bit FNV-1a digest rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace hlyap::projlin
