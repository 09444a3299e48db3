#pragma once

#include <string>
#include <unordered_set>

namespace atlas {

// Default exclusion list. Matching happens after lemmatization, so entries
// are stored in lemmatized form ("doe" covers "does"). Seeded with generic
// function words plus the usual citation debris; domain terms are never
// excluded by default. Mirrored in data/exclusions_default.txt.
inline const std::unordered_set<std::string>& default_exclusions() {
    static const std::unordered_set<std::string> set = {
        // articles, conjunctions, prepositions
        "the", "an", "and", "or", "but", "nor", "not", "no", "if", "then", "else",
        "when", "while", "where", "which", "who", "whom", "whose", "what", "why", "how",
        "that", "this", "these", "those", "there", "here", "than", "thus", "though",
        "although", "however", "moreover", "furthermore", "therefore", "hence",
        "because", "since", "so", "such", "same", "other", "another", "each", "every",
        "either", "neither", "both", "all", "any", "some", "few", "several", "many",
        "much", "more", "most", "less", "least", "very", "quite", "rather", "too",
        "also", "only", "just", "even", "still", "yet", "again", "further", "once",
        "often", "always", "never", "usually", "perhaps", "about", "above", "below",
        "under", "over", "between", "among", "within", "without", "during", "before",
        "after", "until", "upon", "onto", "into", "from", "to", "of", "in", "on", "at",
        "by", "for", "with", "against", "across", "through", "toward", "towards",
        "around", "near", "off", "out", "up", "down", "per", "via", "as", "versus",
        // verbs of being and auxiliaries (lemmatized forms)
        "is", "are", "was", "were", "be", "been", "being", "am", "do", "doe", "did",
        "done", "doing", "have", "has", "had", "having", "will", "would", "shall",
        "should", "can", "could", "may", "might", "must",
        // pronouns
        "we", "you", "he", "she", "it", "its", "they", "them", "him", "her", "us",
        "me", "my", "our", "your", "his", "their", "itself", "themselves",
        // generic comparatives the preliminary results flagged
        "lower", "higher",
        // small number words (numerals are caught by the numeric filter)
        "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        // citation and abbreviation debris
        "et", "al", "eg", "ie", "vs", "etc",
    };
    return set;
}

}  // namespace atlas
