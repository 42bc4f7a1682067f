// Built-in closed-class lexicons (determiners, pronouns, adpositions,
// conjunctions, auxiliaries, particles) per language tag.

#include <string_view>
#include <vector>

namespace semrel::detail {

namespace {

constexpr std::string_view kEnglish[] = {
    "a", "about", "above", "across", "after", "against", "all", "along", "also", "am", "among", "an", "and",
    "another", "any", "anybody", "anyone", "anything", "are", "around", "as", "at", "be", "because", "been",
    "before", "behind", "being", "below", "beneath", "beside", "besides", "between", "beyond", "both", "but",
    "by", "can", "cannot", "could", "did", "do", "does", "doing", "done", "down", "during", "each", "either",
    "every", "everybody", "everyone", "everything", "few", "for", "from", "had", "has", "have", "having", "he",
    "her", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "inside", "into", "is", "it",
    "its", "itself", "just", "may", "me", "might", "mine", "more", "most", "must", "my", "myself", "neither",
    "no", "nobody", "none", "nor", "not", "nothing", "of", "off", "on", "once", "one", "only", "onto", "or",
    "other", "others", "ought", "our", "ours", "ourselves", "out", "outside", "over", "own", "per", "same",
    "shall", "she", "should", "since", "so", "some", "somebody", "someone", "something", "such", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those", "though",
    "through", "throughout", "till", "to", "too", "toward", "towards", "under", "underneath", "unless", "until",
    "up", "upon", "us", "very", "via", "was", "we", "were", "what", "whatever", "when", "whenever", "where",
    "whereas", "wherever", "whether", "which", "whichever", "while", "who", "whoever", "whom", "whose", "why",
    "will", "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself", "yourselves",
    "'s", "n't", "'re", "'ve", "'ll", "'d", "'m", "s", "t",
};

constexpr std::string_view kSpanish[] = {
    "a", "al", "algo", "alguien", "algún", "alguna", "algunas", "alguno", "algunos", "ante", "antes", "aquel",
    "aquella", "aquellas", "aquellos", "aquí", "así", "aunque", "bajo", "cada", "como", "con", "contra", "cual",
    "cuales", "cuando", "cuyo", "de", "del", "desde", "donde", "durante", "e", "el", "él", "ella", "ellas",
    "ellos", "en", "entre", "era", "eran", "es", "esa", "esas", "ese", "eso", "esos", "esta", "está", "estaba",
    "están", "estar", "estas", "este", "esto", "estos", "fue", "fueron", "ha", "había", "han", "hasta", "hay",
    "he", "la", "las", "le", "les", "lo", "los", "me", "mi", "mis", "mí", "muy", "nada", "ni", "ninguno", "no",
    "nos", "nosotros", "nuestra", "nuestro", "o", "os", "para", "pero", "poco", "por", "porque", "que", "qué",
    "quien", "quienes", "se", "sea", "según", "ser", "si", "sí", "sido", "sin", "sino", "sobre", "son", "su",
    "sus", "también", "tan", "te", "ti", "todo", "todos", "tras", "tu", "tus", "tú", "u", "un", "una", "unas",
    "uno", "unos", "usted", "ustedes", "vosotros", "y", "ya", "yo",
};

constexpr std::string_view kHindi[] = {
    "का", "की", "के", "को", "में", "से", "पर", "तक", "ने", "और", "या", "कि", "है", "हैं", "था", "थी", "थे",
    "हो", "होता", "होती", "होते", "हुआ", "हुई", "हुए", "रहा", "रही", "रहे", "गया", "गई", "गए", "यह", "वह",
    "ये", "वे", "इस", "उस", "इन", "उन", "मैं", "हम", "तुम", "आप", "मेरा", "मेरी", "मेरे", "हमारा", "हमारी",
    "हमारे", "उसका", "उसकी", "उसके", "इसका", "इसकी", "इसके", "भी", "ही", "तो", "न", "नहीं", "लेकिन",
    "परंतु", "एक", "कुछ", "सब", "जो", "जब", "तब", "कहाँ", "क्या", "क्यों", "कैसे", "द्वारा", "लिए", "साथ",
    "अपना", "अपनी", "अपने",
};

template <std::size_t N>
std::vector<std::string_view> to_vector(const std::string_view (&words)[N]) {
  return {words, words + N};
}

}  // namespace

std::vector<std::string_view> builtin_function_words(std::string_view language) {
  if (language == "eng" || language == "en") return to_vector(kEnglish);
  if (language == "esp" || language == "es") return to_vector(kSpanish);
  if (language == "hin" || language == "hi") return to_vector(kHindi);
  return {};
}

}  // namespace semrel::detail
