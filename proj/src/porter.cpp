#include "reascirc/porter.hpp"

#include <vector>

namespace reascirc {

namespace {

class Stemmer {
 public:
  explicit Stemmer(std::string_view word) : w_(word) {}

  std::string run() {
    if (w_.size() <= 2) return w_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  std::string w_;

  bool is_consonant(size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Measure of w_[0..end): number of VC sequences.
  size_t measure(size_t end) const {
    size_t m = 0;
    size_t i = 0;
    while (i < end && is_consonant(i)) ++i;
    while (i < end) {
      while (i < end && !is_consonant(i)) ++i;
      if (i >= end) break;
      ++m;
      while (i < end && is_consonant(i)) ++i;
    }
    return m;
  }

  size_t stem_len(std::string_view suffix) const {
    return w_.size() - suffix.size();
  }

  bool ends_with(std::string_view suffix) const {
    return w_.size() >= suffix.size() &&
           std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
  }

  bool has_vowel(size_t end) const {
    for (size_t i = 0; i < end; ++i)
      if (!is_consonant(i)) return true;
    return false;
  }

  bool double_consonant_at_end() const {
    size_t n = w_.size();
    return n >= 2 && w_[n - 1] == w_[n - 2] && is_consonant(n - 1);
  }

  // Stem ends consonant-vowel-consonant, final consonant not w, x or y.
  bool ends_cvc(size_t end) const {
    if (end < 3) return false;
    if (!is_consonant(end - 3) || is_consonant(end - 2) ||
        !is_consonant(end - 1))
      return false;
    char c = w_[end - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  void replace_suffix(std::string_view suffix, std::string_view repl) {
    w_.replace(w_.size() - suffix.size(), suffix.size(), repl);
  }

  // Applies "(m > threshold) suffix -> repl"; returns true if suffix matched
  // (whether or not it fired), so rule lists can stop at the first match.
  bool rule(std::string_view suffix, std::string_view repl, size_t threshold) {
    if (!ends_with(suffix)) return false;
    if (measure(stem_len(suffix)) > threshold) replace_suffix(suffix, repl);
    return true;
  }

  void step1a() {
    if (ends_with("sses")) replace_suffix("sses", "ss");
    else if (ends_with("ies")) replace_suffix("ies", "i");
    else if (ends_with("ss")) {}
    else if (ends_with("s")) replace_suffix("s", "");
  }

  void step1b() {
    if (ends_with("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
      return;
    }
    bool stripped = false;
    if (ends_with("ed") && has_vowel(stem_len("ed"))) {
      replace_suffix("ed", "");
      stripped = true;
    } else if (ends_with("ing") && has_vowel(stem_len("ing"))) {
      replace_suffix("ing", "");
      stripped = true;
    }
    if (!stripped) return;
    if (ends_with("at") || ends_with("bl") || ends_with("iz")) {
      w_ += 'e';
    } else if (double_consonant_at_end() && !ends_with("l") &&
               !ends_with("s") && !ends_with("z")) {
      w_.pop_back();
    } else if (measure(w_.size()) == 1 && ends_cvc(w_.size())) {
      w_ += 'e';
    }
  }

  void step1c() {
    if (ends_with("y") && has_vowel(stem_len("y"))) w_.back() = 'i';
  }

  void step2() {
    static const std::vector<std::pair<std::string_view, std::string_view>>
        rules = {{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
                 {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
                 {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
                 {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                 {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
                 {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
                 {"iviti", "ive"},   {"biliti", "ble"}};
    for (const auto& [suf, repl] : rules)
      if (rule(suf, repl, 0)) return;
  }

  void step3() {
    static const std::vector<std::pair<std::string_view, std::string_view>>
        rules = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"},
                 {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""},
                 {"ness", ""}};
    for (const auto& [suf, repl] : rules)
      if (rule(suf, repl, 0)) return;
  }

  void step4() {
    static const std::vector<std::string_view> suffixes = {
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"};
    for (std::string_view suf : suffixes) {
      if (!ends_with(suf)) continue;
      size_t stem = stem_len(suf);
      if (suf == "ion" && stem > 0 && w_[stem - 1] != 's' && w_[stem - 1] != 't')
        return;
      if (measure(stem) > 1) replace_suffix(suf, "");
      return;
    }
  }

  void step5a() {
    if (!ends_with("e")) return;
    size_t stem = stem_len("e");
    size_t m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) replace_suffix("e", "");
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant_at_end() &&
        w_.back() == 'l')
      w_.pop_back();
  }
};

}  // namespace

std::string porter_stem(std::string_view word) {
  return Stemmer(word).run();
}

}  // namespace reascirc
