// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "reviewjudge/error.hpp"

namespace reviewjudge {

// Generated at configure time from data/stopwords_en.txt.
extern const char* const kBuiltinStopwordsText;

namespace {

#include "transliterate.inc"

// Decodes one UTF-8 sequence starting at s[i]; advances i. Returns
// 0xFFFFFFFF for a malformed sequence (one byte consumed).
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  constexpr char32_t kBad = 0xFFFFFFFF;
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kBad;
  }
  if (i + len > s.size()) {
    ++i;
    return kBad;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kBad;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

// Characters that separate words: general punctuation, spaces, and the
// Latin-1 symbol range.
bool is_separator(char32_t cp) {
  return (cp >= 0x00A0 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2000 && cp <= 0x206F) || cp == 0x3000 || (cp >= 0x2E00 && cp <= 0x2E7F);
}

bool is_vowel_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return true;
    case 'y':
      return i > 0 && !is_vowel_at(w, i - 1);
    default:
      return false;
  }
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel_at(w, i)) return true;
  }
  return false;
}

// Number of VC sequences in [C](VC)^m[V].
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (prev_vowel && !v) ++m;
    prev_vowel = v;
  }
  return m;
}

// consonant-vowel-consonant ending, final consonant not w, x or y.
bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  if (is_vowel_at(w, n - 1) || !is_vowel_at(w, n - 2) || is_vowel_at(w, n - 3)) return false;
  const char last = w[n - 1];
  return last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool ends_double_consonant(std::string_view w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && !is_vowel_at(w, n - 1);
}

// Repairs a stem left by removing -ed / -ing.
std::string restore_stem(std::string stem) {
  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  if (ends_double_consonant(stem)) {
    const char c = stem.back();
    if (c != 'l' && c != 's' && c != 'z') stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

// clang-format off
constexpr std::pair<std::string_view, std::string_view> kExceptions[] = {
    // irregular plurals
    {"men", "man"}, {"women", "woman"}, {"children", "child"}, {"feet", "foot"},
    {"teeth", "tooth"}, {"mice", "mouse"}, {"geese", "goose"}, {"lives", "life"},
    {"knives", "knife"}, {"wives", "wife"}, {"leaves", "leaf"}, {"wolves", "wolf"},
    {"halves", "half"}, {"shelves", "shelf"}, {"selves", "self"}, {"thieves", "thief"},
    {"loaves", "loaf"}, {"calves", "calf"}, {"analyses", "analysis"}, {"crises", "crisis"},
    {"phenomena", "phenomenon"}, {"criteria", "criterion"}, {"oxen", "ox"}, {"dice", "die"},
    {"indices", "index"}, {"matrices", "matrix"}, {"cacti", "cactus"}, {"fungi", "fungus"},
    {"heroes", "hero"}, {"potatoes", "potato"}, {"tomatoes", "tomato"}, {"echoes", "echo"},
    // irregular verbs
    {"went", "go"}, {"gone", "go"}, {"goes", "go"}, {"going", "go"}, {"made", "make"},
    {"said", "say"}, {"says", "say"}, {"got", "get"}, {"gotten", "get"}, {"took", "take"},
    {"taken", "take"}, {"came", "come"}, {"saw", "see"}, {"seen", "see"}, {"knew", "know"},
    {"known", "know"}, {"thought", "think"}, {"gave", "give"}, {"given", "give"},
    {"found", "find"}, {"told", "tell"}, {"felt", "feel"}, {"became", "become"},
    {"kept", "keep"}, {"began", "begin"}, {"begun", "begin"}, {"brought", "bring"},
    {"bought", "buy"}, {"wrote", "write"}, {"written", "write"}, {"sat", "sit"},
    {"stood", "stand"}, {"lost", "lose"}, {"paid", "pay"}, {"met", "meet"}, {"ran", "run"},
    {"heard", "hear"}, {"held", "hold"}, {"meant", "mean"}, {"sent", "send"},
    {"built", "build"}, {"spent", "spend"}, {"understood", "understand"}, {"fell", "fall"},
    {"fallen", "fall"}, {"chose", "choose"}, {"chosen", "choose"}, {"broke", "break"},
    {"broken", "break"}, {"wore", "wear"}, {"worn", "wear"}, {"drove", "drive"},
    {"driven", "drive"}, {"ate", "eat"}, {"eaten", "eat"}, {"drank", "drink"},
    {"drunk", "drink"}, {"sold", "sell"}, {"caught", "catch"}, {"taught", "teach"},
    {"fought", "fight"}, {"forgot", "forget"}, {"forgotten", "forget"}, {"grew", "grow"},
    {"grown", "grow"}, {"threw", "throw"}, {"thrown", "throw"}, {"flew", "fly"},
    {"flown", "fly"}, {"hid", "hide"}, {"hidden", "hide"}, {"rode", "ride"},
    {"ridden", "ride"}, {"risen", "rise"}, {"shook", "shake"}, {"shaken", "shake"},
    {"spoke", "speak"}, {"spoken", "speak"}, {"stole", "steal"}, {"stolen", "steal"},
    {"swam", "swim"}, {"tore", "tear"}, {"torn", "tear"}, {"woke", "wake"},
    {"woken", "wake"}, {"slept", "sleep"}, {"lent", "lend"}, {"bent", "bend"},
    {"dealt", "deal"}, {"fed", "feed"}, {"fled", "flee"}, {"dug", "dig"}, {"hung", "hang"},
    {"shot", "shoot"}, {"slid", "slide"}, {"spun", "spin"}, {"stuck", "stick"},
    {"struck", "strike"}, {"swung", "swing"}, {"sang", "sing"}, {"sung", "sing"},
    {"sank", "sink"}, {"rang", "ring"}, {"blew", "blow"}, {"blown", "blow"},
    {"drew", "draw"}, {"drawn", "draw"}, {"froze", "freeze"}, {"frozen", "freeze"},
    {"bitten", "bite"}, {"sought", "seek"}, {"fitted", "fit"}, {"wept", "weep"},
    {"swept", "sweep"}, {"knelt", "kneel"}, {"forgave", "forgive"}, {"forgiven", "forgive"},
    {"overcame", "overcome"}, {"undertook", "undertake"}, {"withdrew", "withdraw"},
    {"arose", "arise"}, {"arisen", "arise"}, {"awoke", "awake"}, {"bore", "bear"},
    {"borne", "bear"}, {"bred", "breed"}, {"clung", "cling"}, {"crept", "creep"},
    {"ground", "ground"}, {"lay", "lay"}, {"lain", "lie"}, {"sprang", "spring"},
    {"sprung", "spring"}, {"strove", "strive"}, {"stung", "sting"}, {"stunk", "stink"},
    {"wove", "weave"}, {"woven", "weave"}, {"wrung", "wring"}, {"dying", "die"},
    {"lying", "lie"}, {"tying", "tie"}, {"using", "use"}, {"used", "use"}, {"uses", "use"},
    {"adding", "add"}, {"added", "add"}, {"does", "do"}, {"did", "do"}, {"done", "do"},
    // words the suffix rules would damage
    {"nothing", "nothing"}, {"something", "something"}, {"anything", "anything"},
    {"everything", "everything"}, {"morning", "morning"}, {"evening", "evening"},
    {"ceiling", "ceiling"}, {"wedding", "wedding"}, {"pudding", "pudding"},
    {"bedding", "bedding"}, {"clothing", "clothing"}, {"family", "family"},
    {"supply", "supply"}, {"assembly", "assembly"}, {"butterfly", "butterfly"},
    {"hundred", "hundred"}, {"series", "series"}, {"species", "species"}, {"news", "news"},
    {"always", "always"}, {"perhaps", "perhaps"}, {"christmas", "christmas"},
    {"clothes", "clothes"}, {"jeans", "jeans"}, {"pants", "pants"}, {"scissors", "scissors"},
    {"indeed", "indeed"}, {"naked", "naked"}, {"wicked", "wicked"}, {"rugged", "rugged"},
    {"sacred", "sacred"}, {"anyway", "anyway"}, {"lens", "lens"}, {"thus", "thus"},
    {"whereas", "whereas"}, {"sometimes", "sometimes"}, {"besides", "besides"},
    {"afterwards", "afterwards"}, {"kindle", "kindle"}, {"bottle", "bottle"},
};
// clang-format on

const std::unordered_map<std::string_view, std::string_view>& exception_map() {
  static const std::unordered_map<std::string_view, std::string_view> map(std::begin(kExceptions),
                                                                          std::end(kExceptions));
  return map;
}

// One suffix rule application; returns the input unchanged when no rule fires.
std::string strip_once(const std::string& w) {
  const auto& ex = exception_map();
  if (auto it = ex.find(w); it != ex.end()) return std::string(it->second);

  const std::size_t n = w.size();
  if (n < 4) return w;

  if (ends_with(w, "ies")) return n > 4 ? w.substr(0, n - 3) + "y" : w.substr(0, n - 1);
  if (ends_with(w, "s")) {
    if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
    if (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "zzes") ||
        ends_with(w, "ches") || ends_with(w, "shes")) {
      return w.substr(0, n - 2);
    }
    return w.substr(0, n - 1);
  }
  if (ends_with(w, "ied")) return n > 4 ? w.substr(0, n - 3) + "y" : w.substr(0, n - 1);
  if (ends_with(w, "eed")) {
    const std::string stem = w.substr(0, n - 3);
    return measure(stem) > 0 ? stem + "ee" : w;
  }
  if (ends_with(w, "ed")) {
    const std::string stem = w.substr(0, n - 2);
    if (stem.size() < 2 || !has_vowel(stem)) return w;
    return restore_stem(stem);
  }
  if (ends_with(w, "ing")) {
    const std::string stem = w.substr(0, n - 3);
    if (stem.size() < 2 || !has_vowel(stem)) return w;
    return restore_stem(stem);
  }
  if (ends_with(w, "ily")) {
    const std::string stem = w.substr(0, n - 3);
    return stem.size() >= 3 ? stem + "y" : w;
  }
  if (ends_with(w, "ly")) {
    const std::string stem = w.substr(0, n - 2);
    return stem.size() >= 4 && has_vowel(stem) ? stem : w;
  }
  return w;
}

}  // namespace

StopwordList StopwordList::builtin() {
  static const StopwordList list = parse(kBuiltinStopwordsText, Source::Builtin);
  return list;
}

StopwordList StopwordList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("stopword file not found: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text, Source::File);
}

StopwordList StopwordList::parse(std::string_view text, Source source) {
  StopwordList list;
  list.source_ = source;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b != std::string_view::npos) {
      const auto e = line.find_last_not_of(" \t\r");
      std::string word(line.substr(b, e - b + 1));
      for (char& c : word) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      list.words_.insert(std::move(word));
    }
    pos = eol + 1;
  }
  return list;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  auto emit = [&](std::string_view piece) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.append(piece);
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = decode_utf8(text, i);
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (c >= 'a' && c <= 'z') {
        emit(std::string_view(&c, 1));
      } else if (c >= 'A' && c <= 'Z') {
        const char lc = static_cast<char>(c - 'A' + 'a');
        emit(std::string_view(&lc, 1));
      } else if (c >= '0' && c <= '9') {
        emit(std::string_view(&c, 1));
      } else {
        pending_space = true;
      }
    } else if (cp >= 0x00C0 && cp <= 0x00FF) {
      const char* rep = kLatin1Letters[cp - 0x00C0];
      if (*rep == '\0') {
        pending_space = true;
      } else {
        emit(rep);
      }
    } else if (cp >= 0x0100 && cp <= 0x017F) {
      emit(kLatinExtendedA[cp - 0x0100]);
    } else if (cp == 0x00AA) {
      emit("a");
    } else if (cp == 0x00BA) {
      emit("o");
    } else if (is_separator(cp)) {
      pending_space = true;
    }
    // Anything else is dropped without separating the surrounding letters.
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const StopwordList& list) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (!list.contains(t)) out.push_back(t);
  }
  return out;
}

std::string lemmatize(std::string_view token) {
  std::string word(token);
  if (std::any_of(word.begin(), word.end(), [](char c) { return c >= '0' && c <= '9'; })) return word;
  // Rules only shorten words and exception targets are fixpoints, so
  // iterating to a fixpoint terminates and makes the result idempotent.
  for (int guard = 0; guard < 16; ++guard) {
    std::string next = strip_once(word);
    if (next == word) break;
    word = std::move(next);
  }
  return word;
}

std::span<const std::pair<std::string_view, std::string_view>> lemma_exceptions() { return kExceptions; }

TokenizedReview preprocess_review(const Review& review, const StopwordList& list) {
  TokenizedReview out;
  out.review_id = review.id;
  const std::vector<std::string> raw = tokenize(normalize_text(review.text));
  out.tokens = remove_stopwords(raw, list);
  for (std::string& t : out.tokens) t = lemmatize(t);
  return out;
}

std::vector<TokenizedReview> preprocess_corpus(std::span<const Review> reviews, const StopwordList& list,
                                               unsigned workers) {
  std::vector<TokenizedReview> out(reviews.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(reviews.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < reviews.size(); ++i) out[i] = preprocess_review(reviews[i], list);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (reviews.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(reviews.size(), begin + chunk);
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = preprocess_review(reviews[i], list);
    });
  }
  return out;
}

FrequencyStage parse_frequency_stage(std::string_view s) {
  if (s == "raw") return FrequencyStage::Raw;
  if (s == "cleaned") return FrequencyStage::Cleaned;
  throw ArgumentError("unknown frequency stage '" + std::string(s) + "' (expected raw or cleaned)");
}

namespace {

FrequencyTable sorted_table(const std::unordered_map<std::string, std::int64_t>& counts) {
  FrequencyTable table(counts.begin(), counts.end());
  std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return table;
}

}  // namespace

FrequencyTable frequency_table(std::span<const TokenizedReview> corpus) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& r : corpus) {
    for (const auto& t : r.tokens) ++counts[t];
  }
  return sorted_table(counts);
}

FrequencyTable frequency_table(std::span<const std::vector<std::string>> corpus) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& tokens : corpus) {
    for (const auto& t : tokens) ++counts[t];
  }
  return sorted_table(counts);
}

FrequencyTable frequency_table(std::span<const Review> reviews, FrequencyStage stage, const StopwordList& list) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const Review& r : reviews) {
    if (stage == FrequencyStage::Raw) {
      for (auto& t : tokenize(normalize_text(r.text))) ++counts[std::move(t)];
    } else {
      for (auto& t : preprocess_review(r, list).tokens) ++counts[std::move(t)];
    }
  }
  return sorted_table(counts);
}

std::string frequency_json(const FrequencyTable& table, std::size_t top_n) {
  const std::size_t n = top_n == 0 ? table.size() : std::min(top_n, table.size());
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out << ',';
    // Tokens are [a-z0-9]+ so no escaping is needed.
    out << "[\"" << table[i].first << "\"," << table[i].second << ']';
  }
  out << ']';
  return out.str();
}

}  // namespace reviewjudge
