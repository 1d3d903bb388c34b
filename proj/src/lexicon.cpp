// Bundled word lists: the default English stop-word list and the lexicon
// behind the part-of-speech tagger.

#include <array>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dtopics/preprocess.hpp"
#include "unicode.hpp"

namespace dtopics {
namespace {

// Contractions appear without apostrophes because the punctuation eraser runs
// before the stop-word filter.
constexpr const char* kStopwords = R"(
i me my myself we our ours ourselves you your yours yourself yourselves he him
his himself she her hers herself it its itself they them their theirs
themselves what which who whom this that these those am is are was were be been
being have has had having do does did doing a an the and but if or because as
until while of at by for with about against between into through during before
after above below to from up down in out on off over under again further then
once here there when where why how all any both each few more most other some
such no nor not only own same so than too very s t can will just don should now
d ll m o re ve y ain aren couldn didn doesn hadn hasn haven isn ma mightn mustn
needn shan shouldn wasn weren won wouldn dont shouldve arent couldnt didnt
doesnt hadnt hasnt havent isnt mightnt mustnt neednt shant shouldnt wasnt
werent wont wouldnt youre youve youll youd shes thats im ive hes theyre cant
)";

constexpr const char* kDeterminers = R"(
the a an this that these those each every either neither some any no all both
another such what which whose much many several enough certain
)";

constexpr const char* kPronouns = R"(
i me my mine myself you your yours yourself yourselves he him his himself she
her hers herself it its itself we us our ours ourselves they them their theirs
themselves who whom whoever whomever whatever whichever someone somebody
something anyone anybody anything everyone everybody everything nobody nothing
none oneself thee thou ya yall
)";

constexpr const char* kPrepositions = R"(
about above across after against along alongside amid among amongst around at
atop before behind below beneath beside besides between beyond by concerning
despite down during except for from in inside into like near of off on onto
out outside over past per regarding since through throughout till to toward
towards under underneath until unlike up upon versus via with within without
)";

constexpr const char* kConjunctions = R"(
and but or nor yet because although though while whereas if unless whether than
as once lest whenever wherever plus either
)";

constexpr const char* kAdverbs = R"(
not very too also just only even still already always never often sometimes
usually really quite rather almost here there now then today tomorrow yesterday
soon again ever twice perhaps maybe probably actually basically certainly
definitely anyway anyhow somewhat pretty fairly more most less least well away
back else instead otherwise however therefore thus hence indeed yes yeah nope
sure somewhere anywhere everywhere nowhere later ago abroad alone forward
forever meanwhile nearly hardly barely seldom rarely mostly mainly merely
simply truly especially exactly finally recently suddenly
)";

constexpr const char* kVerbs = R"(
is am are was were be been being have has had having do does did done will
would shall should can could may might must get got gets gotten go goes went
gone say says said make makes made take takes took taken know knows knew known
think thinks thought see sees saw seen come comes came want wants look looks
use uses find finds found give gives gave given tell tells told work works call
calls try tries ask asks need needs feel feels felt become becomes became leave
leaves left put puts mean means meant keep keeps kept let lets begin begins
began begun seem seems help helps talk talks turn turns start starts show shows
shown hear hears heard play plays run runs ran move moves like likes live lives
believe believes bring brings brought happen happens write writes wrote written
sit sits sat stand stands stood lose loses lost pay pays paid meet meets met
include includes continue continues set sets learn learns change changes lead
leads led understand understands understood watch watches follow follows stop
stops create creates speak speaks spoke spoken read reads spend spends spent
grow grows grew grown open opens walk walks win wins offer offers remember
remembers love loves consider considers appear appears buy buys bought wait
waits serve serves die dies send sends sent expect expects build builds built
stay stays fall falls fell fallen cut cuts reach reaches kill kills remain
remains suggest suggests raise raises pass passes sell sells sold require
requires report reports decide decides pull pulls guess guesses eat eats ate
eaten drink drinks drank drive drives drove driven fly flies flew flown sleep
sleeps slept wear wears wore worn choose chooses chose chosen forget forgets
forgot forgotten hope hopes cook cooks clean cleans wash washes fix fixes carry
carries catch catches caught teach teaches taught think vote votes save saves
own owns rent rents hate hates enjoy enjoys prefer prefers agree agrees listen
listens visit visits travel travels
)";

constexpr const char* kNouns = R"(
time year people way day man men thing woman women life child children world
school state family student group country problem hand part place case week
company system program question work government number night point home water
room mother area money story fact month lot right study book eye job word
business issue side kind head house service friend father power hour game line
end member law car city community name president team minute idea kid body
information back parent face level office door health person art war history
party result morning reason research girl guy moment air teacher force
education foot feet boy age policy music market sense nation plan college
interest death experience effect class control care field role effort rate
heart drug show leader light voice wife husband police mind price decision son
daughter view relationship town road arm difference value building action
model season society tax director position player record paper space ground
form event official matter center couple site project activity star table
court oil situation cost industry figure street image phone data picture
practice piece land product doctor wall patient worker news test movie north
south east west love support technology step baby computer type attention film
tree source organization hair window evidence population dollar weather food
dog cat garden vacation television insurance crime budget bank church hospital
store restaurant kitchen bedroom yard truck bike bus train plane airport hotel
beach mountain river lake island farm village neighborhood apartment rain snow
summer winter spring fall autumn sun moon sky fish bird horse animal pet
cousin uncle aunt grandmother grandfather brother sister husband boss
colleague neighbor stuff thing things kids cars houses dollars jobs schools
taxes bills bill check card credit debt loan rent salary wage price cost
sport football baseball basketball soccer golf tennis hockey team coach fan
ticket concert song band radio newspaper magazine show channel station movie
camping fishing hunting hobby craft paint painting garden recipe dinner lunch
breakfast meal coffee tea beer wine juice milk bread meat chicken beef pork
vegetable fruit apple salad soup pizza cake cookie candy sugar salt
clothes shirt pants dress shoe hat coat jacket suit uniform fashion style
election vote candidate senator congress court judge jury lawyer trial prison
crime criminal gun weapon army navy soldier military peace freedom right rule
)";

constexpr const char* kAdjectives = R"(
good new first last long great little own other old big high different small
large next early young important few public bad same able free clear full
special easy strong whole real hard best better true white black red blue
green yellow brown gray cold hot warm cool nice happy sad poor rich late local
major national human low simple short single personal recent economic
political social serious dead main similar wrong difficult beautiful final
huge interesting expensive cheap busy tired safe dangerous quick slow bright
dark heavy fine fun funny crazy weird strange normal common private wonderful
terrible awful horrible lovely pretty ugly smart stupid fair unfair healthy
sick wet dry clean dirty quiet loud fresh fast tough easy soft deep wide narrow
tall thin fat empty fair friendly lucky angry afraid glad proud ready
)";

// Suffix rules, tried in order; the stem must keep at least two characters.
struct SuffixRule {
  std::string_view suffix;
  PosTag tag;
};
constexpr std::array<SuffixRule, 24> kSuffixRules = {{
    {"ing", PosTag::VERB},   {"ed", PosTag::VERB},    {"ize", PosTag::VERB},
    {"ise", PosTag::VERB},   {"ify", PosTag::VERB},   {"ly", PosTag::ADV},
    {"tion", PosTag::NOUN},  {"sion", PosTag::NOUN},  {"ment", PosTag::NOUN},
    {"ness", PosTag::NOUN},  {"ity", PosTag::NOUN},   {"ship", PosTag::NOUN},
    {"ism", PosTag::NOUN},   {"ist", PosTag::NOUN},   {"ance", PosTag::NOUN},
    {"ence", PosTag::NOUN},  {"er", PosTag::NOUN},    {"ous", PosTag::ADJ},
    {"ful", PosTag::ADJ},    {"able", PosTag::ADJ},   {"ible", PosTag::ADJ},
    {"ive", PosTag::ADJ},    {"less", PosTag::ADJ},   {"al", PosTag::ADJ},
}};

void add_words(std::unordered_set<std::string>& set, const char* words) {
  std::istringstream in(words);
  std::string w;
  while (in >> w) set.insert(w);
}

// Earlier tables win when a word appears in several: closed classes first.
const std::unordered_map<std::string, PosTag>& lexicon() {
  static const auto table = [] {
    std::unordered_map<std::string, PosTag> m;
    const std::pair<const char*, PosTag> sources[] = {
        {kDeterminers, PosTag::DET},  {kPronouns, PosTag::PRON},
        {kPrepositions, PosTag::PREP}, {kConjunctions, PosTag::CONJ},
        {kAdverbs, PosTag::ADV},      {kVerbs, PosTag::VERB},
        {kNouns, PosTag::NOUN},       {kAdjectives, PosTag::ADJ},
    };
    for (const auto& [words, tag] : sources) {
      std::istringstream in(words);
      std::string w;
      while (in >> w) m.emplace(w, tag);
    }
    return m;
  }();
  return table;
}

bool is_number_like(std::string_view word) {
  bool digit = false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const char c = word[i];
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (!(c == '.' || c == ',' || ((c == '+' || c == '-') && i == 0))) {
      return false;
    }
  }
  return digit;
}

}  // namespace

const std::unordered_set<std::string>& default_stopwords() {
  static const auto list = [] {
    std::unordered_set<std::string> s;
    add_words(s, kStopwords);
    return s;
  }();
  return list;
}

PosTag tag_word(std::string_view word) {
  if (is_number_like(word)) return PosTag::NUM;
  const std::string lower = unicode::to_lower(unicode::strip_punctuation(word));
  if (lower.empty()) return PosTag::OTHER;
  if (unicode::has_digit(lower)) return PosTag::NUM;
  const auto& lex = lexicon();
  if (auto it = lex.find(lower); it != lex.end()) return it->second;
  // Plural nouns and third-person verbs: retry the lookup on the stem.
  auto ends_with = [&](std::string_view suffix) {
    return lower.size() > suffix.size() + 1 &&
           lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  std::vector<std::string> stems;
  if (ends_with("ies")) stems.push_back(lower.substr(0, lower.size() - 3) + "y");
  if (ends_with("es")) stems.push_back(lower.substr(0, lower.size() - 2));
  if (ends_with("s") && !ends_with("ss")) stems.push_back(lower.substr(0, lower.size() - 1));
  for (const auto& stem : stems) {
    if (auto it = lex.find(stem); it != lex.end() && (it->second == PosTag::NOUN || it->second == PosTag::VERB))
      return it->second;
  }
  for (const auto& rule : kSuffixRules) {
    if (lower.size() >= rule.suffix.size() + 2 &&
        lower.compare(lower.size() - rule.suffix.size(), rule.suffix.size(), rule.suffix) == 0)
      return rule.tag;
  }
  // Open-class default, as in most lexicon taggers.
  return PosTag::NOUN;
}

}  // namespace dtopics
