#include <string>

#include "sumprobe/metrics.hpp"

// Porter (1980) stemmer, steps 1a-5b over lowercase ASCII words.
// Non-alphabetic tokens pass through unchanged.

namespace sumprobe::metrics {

namespace {

bool is_cons(const std::string& w, int i) {
  char c = w[i];
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_cons(w, i - 1);
    default:
      return true;
  }
}

// number of consonant-vowel sequences in w[0..end]
int measure(const std::string& w, int end) {
  int n = 0, i = 0;
  while (i <= end && is_cons(w, i)) ++i;
  while (i <= end) {
    while (i <= end && !is_cons(w, i)) ++i;
    if (i > end) break;
    ++n;
    while (i <= end && is_cons(w, i)) ++i;
  }
  return n;
}

bool has_vowel(const std::string& w, int end) {
  for (int i = 0; i <= end; ++i)
    if (!is_cons(w, i)) return true;
  return false;
}

bool double_cons(const std::string& w) {
  int n = static_cast<int>(w.size());
  return n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1);
}

// consonant-vowel-consonant where the final consonant is not w, x or y
bool cvc(const std::string& w, int end) {
  if (end < 2) return false;
  if (!is_cons(w, end) || is_cons(w, end - 1) || !is_cons(w, end - 2)) return false;
  char c = w[end];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, const std::string& suf) {
  return w.size() >= suf.size() &&
         w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
}

// replace suffix when the measure of the remaining stem exceeds m_min
bool replace_m(std::string& w, const std::string& suf, const std::string& rep, int m_min) {
  if (!ends_with(w, suf)) return false;
  int stem_end = static_cast<int>(w.size() - suf.size()) - 1;
  if (stem_end < 0 || measure(w, stem_end) <= m_min) return true;  // matched, no change
  w.replace(w.size() - suf.size(), suf.size(), rep);
  return true;
}

}  // namespace

std::string porter_stem(const std::string& word) {
  for (char c : word)
    if (c < 'a' || c > 'z') return word;
  if (word.size() <= 2) return word;
  std::string w = word;

  // step 1a
  if (ends_with(w, "sses")) w.erase(w.size() - 2);
  else if (ends_with(w, "ies")) w.erase(w.size() - 2);
  else if (!ends_with(w, "ss") && ends_with(w, "s")) w.erase(w.size() - 1);

  // step 1b
  bool step1b_extra = false;
  if (ends_with(w, "eed")) {
    if (measure(w, static_cast<int>(w.size()) - 4) > 0) w.erase(w.size() - 1);
  } else if (ends_with(w, "ed") && has_vowel(w, static_cast<int>(w.size()) - 3)) {
    w.erase(w.size() - 2);
    step1b_extra = true;
  } else if (ends_with(w, "ing") && w.size() > 3 &&
             has_vowel(w, static_cast<int>(w.size()) - 4)) {
    w.erase(w.size() - 3);
    step1b_extra = true;
  }
  if (step1b_extra) {
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
      w.push_back('e');
    } else if (double_cons(w) && !ends_with(w, "l") && !ends_with(w, "s") &&
               !ends_with(w, "z")) {
      w.erase(w.size() - 1);
    } else if (measure(w, static_cast<int>(w.size()) - 1) == 1 &&
               cvc(w, static_cast<int>(w.size()) - 1)) {
      w.push_back('e');
    }
  }

  // step 1c
  if (ends_with(w, "y") && has_vowel(w, static_cast<int>(w.size()) - 2))
    w.back() = 'i';

  // step 2
  static const std::pair<const char*, const char*> step2[] = {
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}};
  for (const auto& [suf, rep] : step2)
    if (replace_m(w, suf, rep, 0)) break;

  // step 3
  static const std::pair<const char*, const char*> step3[] = {
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""}};
  for (const auto& [suf, rep] : step3)
    if (replace_m(w, suf, rep, 0)) break;

  // step 4
  static const char* step4[] = {"al",  "ance", "ence", "er",  "ic",  "able",
                                "ible", "ant",  "ement", "ment", "ent", "ou",
                                "ism",  "ate",  "iti",   "ous",  "ive", "ize"};
  bool done4 = false;
  for (const char* suf : step4) {
    if (ends_with(w, suf)) {
      int stem_end = static_cast<int>(w.size() - std::string(suf).size()) - 1;
      if (stem_end >= 0 && measure(w, stem_end) > 1) w.erase(stem_end + 1);
      done4 = true;
      break;
    }
  }
  if (!done4 && ends_with(w, "ion") && w.size() > 3 &&
      (w[w.size() - 4] == 's' || w[w.size() - 4] == 't')) {
    int stem_end = static_cast<int>(w.size()) - 4;
    if (measure(w, stem_end) > 1) w.erase(stem_end + 1);
  }

  // step 5a
  if (ends_with(w, "e")) {
    int end = static_cast<int>(w.size()) - 2;
    int m = measure(w, end);
    if (m > 1 || (m == 1 && !cvc(w, end))) w.erase(w.size() - 1);
  }
  // step 5b
  if (double_cons(w) && ends_with(w, "l") &&
      measure(w, static_cast<int>(w.size()) - 1) > 1)
    w.erase(w.size() - 1);

  return w;
}

}  // namespace sumprobe::metrics
