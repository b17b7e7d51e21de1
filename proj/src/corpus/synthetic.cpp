// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/corpus/synthetic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cloze/rng.hpp"
#include "json.hpp"

namespace clozeread::corpus {
namespace {

const std::vector<std::string> kFirstNames = {
    "Alice",  "Bruno",  "Carla",   "Dmitri", "Elena",  "Farid",  "Greta",
    "Hiro",   "Ines",   "Jonas",   "Keira",  "Lars",   "Mira",   "Nadia",
    "Oscar",  "Priya",  "Quentin", "Rosa",   "Stefan", "Tamsin", "Ulrich",
    "Vera",   "Wendell", "Xenia",  "Yusuf",  "Zora",   "Anton",  "Beatriz",
    "Cyril",  "Delia",  "Emil",    "Flora",  "Gideon", "Hanna",  "Ivo",
    "Juno",   "Kasper", "Lena",    "Milo",   "Noor"};

const std::vector<std::string> kLastNames = {
    "Abbott",   "Brennan",  "Castillo", "Dorsey",   "Eriksen",  "Fairbank",
    "Galloway", "Hartmann", "Ibarra",   "Jablonski", "Kowalczyk", "Lindqvist",
    "Moreau",   "Nakamura", "Okafor",   "Petrov",   "Quimby",   "Rasmussen",
    "Sokolov",  "Thornton", "Underhill", "Valente",  "Whitlock", "Yamada",
    "Zielinski", "Ashdown", "Blackwood", "Carvalho", "Delacroix", "Engstrom",
    "Fitzroy",  "Gallagher", "Holloway", "Ivanova",  "Jimenez",  "Kingsley",
    "Lombardi", "Mcallister", "Novak",  "Ortega",   "Pemberton", "Quiroga",
    "Redgrave", "Santoro",  "Tremblay", "Ueda",     "Vasquez",  "Winslow",
    "Yardley",  "Zamora",   "Aldridge", "Bellamy",  "Crowther", "Dunmore",
    "Ellison",  "Forsythe", "Gresham",  "Hargreave", "Ingram",  "Jessop"};

std::vector<std::string> split_words(const std::string& pattern) {
  std::istringstream in(pattern);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct Entity {
  std::string first;
  std::string last;
};

struct Builder {
  Tokens tokens;
  std::vector<bool> caps;

  void word(const std::string& w) {
    tokens.push_back(w);
    caps.push_back(false);
  }
  void name(const std::string& w) {
    std::string lower = w;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    tokens.push_back(lower);
    caps.push_back(true);
  }
};

std::size_t slot_count(const std::string& pattern) {
  std::size_t n = 0;
  for (const auto& w : split_words(pattern)) {
    if (w == "{0}" || w == "{1}") ++n;
  }
  return n;
}

}  // namespace

TemplateBank TemplateBank::builtin() {
  TemplateBank bank;
  bank.relations = {
      {"hire",
       {"{0} hired {1} to lead the new research team .",
        "the new research team will be led by {1} , {0} announced ."},
       {"{1} takes charge of a team after a job offer from {0}"}},
      {"sue",
       {"{0} filed a lawsuit against {1} over unpaid fees .",
        "lawyers for {0} launched legal action against {1} over fees ."},
       {"{0} is taking {1} to court in a dispute about money"}},
      {"marry",
       {"{0} married {1} in a small ceremony by the lake .",
        "{0} and the long time partner {1} wed at a quiet lakeside ceremony ."},
       {"{1} is now the spouse of {0} following a private wedding"}},
      {"defeat",
       {"{0} beat {1} in the final round of the chess tournament .",
        "in the chess final {0} won every game against {1} ."},
       {"{1} lost the championship decider to {0}"}},
      {"interview",
       {"{0} interviewed {1} about the election on live television .",
        "on the evening broadcast {0} questioned {1} about the vote ."},
       {"{1} answered questions from {0} on air about politics"}},
      {"praise",
       {"{0} praised {1} for the quick response to the flood .",
        "{0} said {1} had acted bravely when the river burst its banks ."},
       {"{1} earned warm words from {0} over flood relief"}},
      {"replace",
       {"{0} will replace {1} as head of the finance committee .",
        "the finance committee confirmed {0} as successor to {1} ."},
       {"{1} steps down from the committee with {0} taking over"}},
      {"sell",
       {"{0} sold the shipping company to {1} for a record sum .",
        "{1} paid a record sum to acquire the shipping firm from {0} ."},
       {"{1} is the new owner of the firm previously run by {0}"}},
      {"rescue",
       {"{0} rescued {1} from the burning warehouse .",
        "{0} pulled {1} out of the warehouse fire ."},
       {"{1} owes survival of a blaze to {0}"}},
      {"criticise",
       {"{0} criticised {1} for missing the crucial vote .",
        "{0} attacked {1} for being absent from the vote ."},
       {"{1} faced a rebuke from {0} over an absence"}},
      {"coach",
       {"{0} has coached {1} since the spring season .",
        "{1} has trained under {0} since spring ."},
       {"{1} credits the mentor {0} for recent form"}},
      {"invite",
       {"{0} invited {1} to speak at the climate summit .",
        "{1} received an invitation from {0} to address the summit ."},
       {"{1} will give a summit address at the request of {0}"}},
      {"donate",
       {"{0} thanked {1} for the generous donation to the hospital .",
        "{1} gave a large gift to the hospital , {0} said ."},
       {"{1} funded the hospital and earned gratitude from {0}"}},
      {"endorse",
       {"{0} endorsed {1} for the mayoral race .",
        "{0} backed {1} in the campaign for mayor ."},
       {"{1} won the support of {0} ahead of the mayoral vote"}},
  };
  bank.fillers = {
      "{0} declined to comment on the report .",
      "a spokesman for {0} said the matter was closed .",
      "{0} was seen leaving the building on monday .",
      "friends of {0} described the mood as calm .",
      "{0} posted a short message online late on friday .",
      "{0} has not responded to requests for comment .",
      "{0} and {1} attended the same charity dinner last year .",
      "a photograph showed {0} talking with {1} outside the court .",
      "{0} is expected to travel abroad next week .",
      "critics of {0} were not available for comment .",
  };
  return bank;
}

SyntheticConfig parse_synthetic_config(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  SyntheticConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        field = j[key].get<std::remove_reference_t<decltype(field)>>();
      } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config field '") + key +
                                    "' has the wrong type");
      }
    }
  };
  read("num_articles", c.num_articles);
  read("entities_per_article", c.entities_per_article);
  read("facts_per_article", c.facts_per_article);
  read("filler_sentences", c.filler_sentences);
  read("highlights_per_article", c.highlights_per_article);
  read("max_tokens", c.max_tokens);
  read("seed", c.seed);
  if (j.contains("templates")) {
    c.bank.relations.clear();
    for (const auto& t : j["templates"]) {
      RelationTemplate r;
      r.name = t.value("name", "");
      r.body = t.at("body").get<std::vector<std::string>>();
      r.highlight = t.at("highlight").get<std::vector<std::string>>();
      c.bank.relations.push_back(std::move(r));
    }
  }
  if (j.contains("fillers")) {
    c.bank.fillers = j["fillers"].get<std::vector<std::string>>();
  }
  validate(c);
  return c;
}

void validate(const SyntheticConfig& c) {
  if (c.bank.relations.empty()) {
    throw std::invalid_argument("template bank has no relations");
  }
  for (const auto& r : c.bank.relations) {
    if (r.body.empty() || r.highlight.empty()) {
      throw std::invalid_argument("relation '" + r.name +
                                  "' needs body and highlight patterns");
    }
    for (const auto& p : r.body) {
      if (slot_count(p) != 2) {
        throw std::invalid_argument("body pattern needs {0} and {1}: " + p);
      }
    }
    for (const auto& p : r.highlight) {
      if (slot_count(p) != 2) {
        throw std::invalid_argument("highlight pattern needs {0} and {1}: " +
                                    p);
      }
    }
  }
  if (c.entities_per_article < 2) {
    throw std::invalid_argument("entities_per_article must be at least 2");
  }
  if (c.entities_per_article > kFirstNames.size()) {
    throw std::invalid_argument("entities_per_article exceeds the name pool");
  }
  if (c.facts_per_article < 1 ||
      c.facts_per_article > c.bank.relations.size()) {
    throw std::invalid_argument(
        "facts_per_article must lie in [1, number of relations]");
  }
  if (c.highlights_per_article < 1 ||
      c.highlights_per_article > c.facts_per_article) {
    throw std::invalid_argument(
        "highlights_per_article must lie in [1, facts_per_article]");
  }
  if (c.max_tokens < 20) throw std::invalid_argument("max_tokens too small");
}

std::vector<Article> generate_synthetic(const SyntheticConfig& config) {
  validate(config);
  const auto& bank = config.bank;
  std::vector<Article> articles;
  articles.reserve(config.num_articles);

  for (std::size_t a = 0; a < config.num_articles; ++a) {
    Rng rng(derive_seed(config.seed, {a}));

    std::vector<std::size_t> firsts(kFirstNames.size()), lasts(kLastNames.size());
    for (std::size_t i = 0; i < firsts.size(); ++i) firsts[i] = i;
    for (std::size_t i = 0; i < lasts.size(); ++i) lasts[i] = i;
    shuffle(firsts, rng);
    shuffle(lasts, rng);
    std::vector<Entity> entities;
    for (std::size_t e = 0; e < config.entities_per_article; ++e) {
      entities.push_back({kFirstNames[firsts[e]], kLastNames[lasts[e]]});
    }

    struct Fact {
      std::size_t relation;
      std::size_t subject, object;
    };
    std::vector<std::size_t> relations(bank.relations.size());
    for (std::size_t i = 0; i < relations.size(); ++i) relations[i] = i;
    shuffle(relations, rng);
    std::vector<Fact> facts;
    for (std::size_t f = 0; f < config.facts_per_article; ++f) {
      const std::size_t s = uniform_index(rng, entities.size());
      std::size_t o = uniform_index(rng, entities.size() - 1);
      if (o >= s) ++o;
      facts.push_back({relations[f], s, o});
    }

    // Sentence plan: every fact once, fillers in between, shuffled.
    struct Sentence {
      std::string pattern;
      std::size_t e0, e1;
    };
    std::vector<Sentence> plan;
    for (const auto& f : facts) {
      const auto& r = bank.relations[f.relation];
      plan.push_back({r.body[uniform_index(rng, r.body.size())], f.subject,
                      f.object});
    }
    for (std::size_t k = 0; k < config.filler_sentences && !bank.fillers.empty();
         ++k) {
      const std::size_t e0 = uniform_index(rng, entities.size());
      std::size_t e1 = uniform_index(rng, entities.size() - 1);
      if (e1 >= e0) ++e1;
      plan.push_back(
          {bank.fillers[uniform_index(rng, bank.fillers.size())], e0, e1});
    }
    shuffle(plan, rng);
    // Facts must survive the length cap, so they go first when trimming.
    std::stable_partition(plan.begin(), plan.end(), [&](const Sentence& s) {
      return slot_count(s.pattern) == 2 &&
             std::any_of(bank.relations.begin(), bank.relations.end(),
                         [&](const RelationTemplate& r) {
                           return std::find(r.body.begin(), r.body.end(),
                                            s.pattern) != r.body.end();
                         });
    });
    std::vector<Sentence> kept;
    std::size_t length = 0;
    for (const auto& s : plan) {
      const std::size_t n = split_words(s.pattern).size() + 2;
      if (length + n > config.max_tokens && !kept.empty() &&
          kept.size() >= facts.size()) {
        continue;
      }
      kept.push_back(s);
      length += n;
    }
    // Restore a mixed order: fact sentences were moved up front above.
    shuffle(kept, rng);

    Builder body;
    std::vector<bool> mentioned(entities.size(), false);
    auto emit_entity = [&](Builder& b, std::size_t e, bool allow_short) {
      if (allow_short && mentioned[e] && uniform01(rng) < 0.5) {
        b.name(entities[e].last);
      } else {
        b.name(entities[e].first);
        b.name(entities[e].last);
      }
      mentioned[e] = true;
    };
    for (const auto& s : kept) {
      for (const auto& w : split_words(s.pattern)) {
        if (w == "{0}") {
          emit_entity(body, s.e0, true);
        } else if (w == "{1}") {
          emit_entity(body, s.e1, true);
        } else {
          body.word(w);
        }
      }
    }

    Article article;
    article.tokens = std::move(body.tokens);
    article.capitalized = std::move(body.caps);
    for (std::size_t h = 0; h < config.highlights_per_article; ++h) {
      const Fact& f = facts[h];
      const auto& r = bank.relations[f.relation];
      Builder hb;
      for (const auto& w :
           split_words(r.highlight[uniform_index(rng, r.highlight.size())])) {
        if (w == "{0}") {
          emit_entity(hb, f.subject, false);
        } else if (w == "{1}") {
          emit_entity(hb, f.object, false);
        } else {
          hb.word(w);
        }
      }
      article.highlights.push_back(std::move(hb.tokens));
    }
    articles.push_back(std::move(article));
  }
  return articles;
}

}  // namespace clozeread::corpus
