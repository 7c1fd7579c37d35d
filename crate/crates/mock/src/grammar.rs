//! Template grammars for the three fixture tasks.
//!
//! The fixture datasets and the mock chat service draw from the same word
//! lists but through different sentence templates, roughly like a real
//! model writing in its own style about the same domain.

use crate::Rng;

pub const SST2_LABELS: [&str; 2] = ["negative", "positive"];
pub const SNIPS_LABELS: [&str; 7] = [
    "AddToPlaylist",
    "BookRestaurant",
    "GetWeather",
    "PlayMusic",
    "RateBook",
    "SearchCreativeWork",
    "SearchScreeningEvent",
];
pub const TREC_LABELS: [&str; 6] = ["ABBR", "DESC", "ENTY", "HUM", "LOC", "NUM"];

/// Sentiment adjectives in thesaurus-connected clusters.
pub const POSITIVE: [&str; 34] = [
    "wonderful", "marvelous", "fantastic", "terrific", "tremendous", "wondrous", "grand",
    "splendid", "glorious", "magnificent", "brilliant", "superb", "excellent", "resplendent",
    "great", "outstanding",
    "enjoyable", "gratifying", "pleasurable", "delightful", "delicious",
    "lovely", "adorable", "endearing",
    "charming", "magical",
    "good", "sound",
    "exquisite", "elegant", "graceful",
    "moving", "touching", "poignant",
];
pub const NEGATIVE: [&str; 34] = [
    "terrible", "awful", "dreadful", "atrocious", "horrific", "horrendous", "dire",
    "boring", "tedious", "dull", "tiresome", "wearisome", "irksome", "slow",
    "poor", "miserable", "pathetic", "pitiful", "wretched", "woeful", "deplorable",
    "clumsy", "awkward", "clunky", "inept", "cumbersome",
    "horrible", "frightful", "ugly",
    "lousy", "rotten", "crappy",
    "dismal", "dreary",
];

/// Film nouns without thesaurus entries, so word-level augmentation can only
/// act on the sentiment word.
const FILM_NOUNS: [&str; 15] = [
    "soundtrack", "cinematography", "sequel", "thriller", "screenplay", "premise", "cameo", "biopic",
    "trailer", "visuals", "storyline", "ensemble", "casting", "editing", "montage",
];
const TAILS: [&str; 5] = ["from start to finish", "in every scene", "throughout", "by the final act", "on the whole"];

pub fn sst2_fixture(rng: &mut Rng, label: &str) -> String {
    let adj = adjective(rng, label);
    let noun = rng.pick(&FILM_NOUNS);
    let s = match rng.below(5) {
        0 => format!("the {noun} is {adj}"),
        1 => format!("a {adj} {noun}"),
        2 => format!("this {noun} was {adj}"),
        3 => format!("what a {adj} {noun}"),
        _ => format!("{adj} {noun}"),
    };
    tidy(&s)
}

pub fn sst2_generated(rng: &mut Rng, label: &str) -> String {
    let adj = adjective(rng, label);
    let noun = rng.pick(&FILM_NOUNS);
    let s = match rng.below(6) {
        0 => format!("I thought the {noun} was {adj}."),
        1 => format!("This {noun} is truly {adj}."),
        2 => format!("An absolutely {adj} {noun}, {}.", rng.pick(&TAILS)),
        3 => format!("Honestly, the {noun} was {adj} {}.", rng.pick(&TAILS)),
        4 => format!("What a {adj} {noun} this turned out to be."),
        _ => format!("The {noun} is {adj} and I would say so again."),
    };
    tidy(&s)
}

fn adjective<'a>(rng: &mut Rng, label: &str) -> &'a str {
    if label == "positive" {
        rng.pick(&POSITIVE)
    } else {
        rng.pick(&NEGATIVE)
    }
}

const BOOKS: [&str; 16] = [
    "the silent forest", "winter harbor", "a tale of two rivers", "the glass garden", "midnight atlas",
    "the copper key", "ocean of stars", "the last lighthouse", "paper kingdoms", "the hollow crown",
    "seven bridges", "the quiet engine", "moonlit roads", "the amber city", "distant echoes", "iron orchard",
];
const SONGS: [&str; 14] = [
    "blue horizon", "dancing in the rain", "summer nights", "electric heart", "golden hour",
    "city lights", "river song", "wild wind", "paper planes", "neon dreams", "slow motion",
    "falling stars", "open road", "velvet sky",
];
const ARTISTS: [&str; 12] = [
    "the lumineers", "adele", "miles davis", "taylor swift", "coldplay", "nina simone",
    "daft punk", "bob marley", "the beatles", "norah jones", "radiohead", "louis armstrong",
];
const PLAYLISTS: [&str; 10] = [
    "workout", "road trip", "chill vibes", "dinner party", "morning coffee", "study session",
    "throwback", "rainy day", "summer hits", "late night",
];
const GENRES: [&str; 8] = ["jazz", "rock", "classical", "hip hop", "country", "blues", "reggae", "pop"];
const RESTAURANTS: [&str; 10] = [
    "the olive tree", "golden dragon", "casa maria", "the blue oyster", "sakura house",
    "bella napoli", "the rusty spoon", "le petit bistro", "spice route", "harbor grill",
];
const FOODS: [&str; 8] = ["italian", "sushi", "thai", "mexican", "indian", "french", "seafood", "vegan"];
const CITIES: [&str; 14] = [
    "london", "paris", "tokyo", "chicago", "madrid", "berlin", "toronto", "sydney", "rome",
    "boston", "seattle", "lisbon", "vienna", "dublin",
];
const TIMES: [&str; 9] = [
    "tomorrow", "tonight", "this weekend", "next monday", "at noon", "on friday", "in two days",
    "this afternoon", "next week",
];
const WORK_TYPES: [&str; 6] = ["movie", "tv show", "book", "video game", "album", "novel"];
const TITLES: [&str; 12] = [
    "the long voyage", "shadow point", "empire of dust", "the clockmaker", "northern lights",
    "silver lining", "the forgotten door", "crimson tide", "fields of gold", "the night train",
    "broken arrow", "sea of glass",
];
const CINEMAS: [&str; 8] = [
    "the grand cinema", "riverside theater", "starlight movies", "odeon plaza", "the majestic",
    "cineworld downtown", "the roxy", "park avenue theater",
];

pub fn snips_fixture(rng: &mut Rng, label: &str) -> String {
    let s = match label {
        "RateBook" => match rng.below(3) {
            0 => format!("rate {} {} out of 6", rng.pick(&BOOKS), 1 + rng.below(6)),
            1 => format!("give {} a rating of {} stars", rng.pick(&BOOKS), 1 + rng.below(5)),
            _ => format!("i rate the book {} {} points", rng.pick(&BOOKS), 1 + rng.below(6)),
        },
        "AddToPlaylist" => match rng.below(3) {
            0 => format!("add {} to my {} playlist", rng.pick(&SONGS), rng.pick(&PLAYLISTS)),
            1 => format!("put {} on the {} list", rng.pick(&ARTISTS), rng.pick(&PLAYLISTS)),
            _ => format!("include the song {} in {}", rng.pick(&SONGS), rng.pick(&PLAYLISTS)),
        },
        "PlayMusic" => match rng.below(3) {
            0 => format!("play {} by {}", rng.pick(&SONGS), rng.pick(&ARTISTS)),
            1 => format!("play some {} music", rng.pick(&GENRES)),
            _ => format!("i want to hear {}", rng.pick(&ARTISTS)),
        },
        "BookRestaurant" => match rng.below(3) {
            0 => format!("book a table for {} at {}", 2 + rng.below(7), rng.pick(&RESTAURANTS)),
            1 => format!("reserve a {} restaurant in {} {}", rng.pick(&FOODS), rng.pick(&CITIES), rng.pick(&TIMES)),
            _ => format!("i need a reservation at {} {}", rng.pick(&RESTAURANTS), rng.pick(&TIMES)),
        },
        "GetWeather" => match rng.below(3) {
            0 => format!("what is the weather in {} {}", rng.pick(&CITIES), rng.pick(&TIMES)),
            1 => format!("will it rain in {} {}", rng.pick(&CITIES), rng.pick(&TIMES)),
            _ => format!("tell me the forecast for {}", rng.pick(&CITIES)),
        },
        "SearchCreativeWork" => match rng.below(3) {
            0 => format!("find the {} {}", rng.pick(&WORK_TYPES), rng.pick(&TITLES)),
            1 => format!("show me the {} called {}", rng.pick(&WORK_TYPES), rng.pick(&TITLES)),
            _ => format!("look up {}", rng.pick(&TITLES)),
        },
        _ => match rng.below(3) {
            0 => format!("find movie times for {} at {}", rng.pick(&TITLES), rng.pick(&CINEMAS)),
            1 => format!("what movies are playing at {} {}", rng.pick(&CINEMAS), rng.pick(&TIMES)),
            _ => format!("show the schedule for {}", rng.pick(&TITLES)),
        },
    };
    tidy(&s)
}

pub fn snips_generated(rng: &mut Rng, label: &str) -> String {
    let s = match label {
        "RateBook" => format!("Rate the book {} {} out of 5 stars.", title_case(rng.pick(&BOOKS)), 1 + rng.below(5)),
        "AddToPlaylist" => format!(
            "Add {} by {} to my {} playlist.",
            title_case(rng.pick(&SONGS)),
            title_case(rng.pick(&ARTISTS)),
            title_case(rng.pick(&PLAYLISTS))
        ),
        "PlayMusic" => match rng.below(2) {
            0 => format!("Play {} by {}.", title_case(rng.pick(&SONGS)), title_case(rng.pick(&ARTISTS))),
            _ => format!("Play some {} from {}.", rng.pick(&GENRES), title_case(rng.pick(&ARTISTS))),
        },
        "BookRestaurant" => format!(
            "Book a table for {} at {} {}.",
            2 + rng.below(7),
            title_case(rng.pick(&RESTAURANTS)),
            rng.pick(&TIMES)
        ),
        "GetWeather" => format!("Tell me the weather in {} {}.", title_case(rng.pick(&CITIES)), rng.pick(&TIMES)),
        "SearchCreativeWork" => format!("Find the {} {}.", rng.pick(&WORK_TYPES), title_case(rng.pick(&TITLES))),
        _ => format!(
            "Find showtimes for {} at {} {}.",
            title_case(rng.pick(&TITLES)),
            title_case(rng.pick(&CINEMAS)),
            rng.pick(&TIMES)
        ),
    };
    tidy(&s)
}

const ABBRS: [&str; 24] = [
    "nasa", "fbi", "laser", "scuba", "radar", "unicef", "nato", "dna", "aids", "ibm", "cia", "bbc", "ufo", "awol",
    "ntsc", "rpm", "mph", "cpu", "gmt", "vip", "asap", "rsvp", "iq", "opec",
];
const ENTITIES: [&str; 12] = [
    "fruit", "instrument", "currency", "language", "animal", "disease", "sport", "drink", "flower",
    "gemstone", "vegetable", "metal",
];
const ENTITY_CONTEXTS: [&str; 8] = [
    "grows in the tropics", "is used in orchestras", "was popular in ancient rome", "has the most calories",
    "is native to australia", "is made from grapes", "is played on ice", "appears on the flag of canada",
];
const CONCEPTS: [&str; 16] = [
    "photosynthesis", "inflation", "democracy", "gravity", "a black hole", "the stock market",
    "an allergy", "a sonnet", "entropy", "a tsunami", "a virus", "jazz", "a solar eclipse", "osmosis",
    "a recession", "the greenhouse effect",
];
const PEOPLE_ACTS: [&str; 18] = [
    "invented the telephone", "painted the mona lisa", "discovered penicillin", "wrote hamlet",
    "was the first president of the united states", "founded the roman empire", "built the first airplane",
    "composed the moonlight sonata", "led the french revolution", "discovered america", "wrote the odyssey",
    "first climbed mount everest", "wrote the theory of relativity", "painted the sistine chapel ceiling",
    "invented the light bulb", "discovered radium", "wrote don quixote", "founded microsoft",
];
const PLACES: [&str; 12] = [
    "the colosseum", "machu picchu", "the great wall", "troy", "babylon", "petra", "angkor wat",
    "the parthenon", "stonehenge", "carthage", "pompeii", "timbuktu",
];
const EVENTS: [&str; 14] = [
    "world war one", "the french revolution", "the moon landing", "the fall of rome", "the black death",
    "the industrial revolution", "the civil war", "the gold rush", "the renaissance", "the cold war",
    "the great depression", "the hundred years war", "the boston tea party", "the space race",
];

pub fn trec_fixture(rng: &mut Rng, label: &str) -> String {
    let s = match label {
        "ABBR" => match rng.below(3) {
            0 => format!("what does {} stand for", rng.pick(&ABBRS)),
            1 => format!("what is the full form of {}", rng.pick(&ABBRS)),
            _ => format!("what is the abbreviation {} short for", rng.pick(&ABBRS)),
        },
        "ENTY" => format!("what {} {}", rng.pick(&ENTITIES), rng.pick(&ENTITY_CONTEXTS)),
        "DESC" => match rng.below(5) {
            0 => format!("what is {}", rng.pick(&CONCEPTS)),
            1 => format!("how does {} work", rng.pick(&CONCEPTS)),
            2 => format!("what causes {}", rng.pick(&CONCEPTS)),
            3 => format!("why is {} important", rng.pick(&CONCEPTS)),
            _ => format!("what is meant by {}", rng.pick(&CONCEPTS)),
        },
        "HUM" => match rng.below(4) {
            0 => format!("who {}", rng.pick(&PEOPLE_ACTS)),
            1 => format!("what person {}", rng.pick(&PEOPLE_ACTS)),
            2 => format!("name the person who {}", rng.pick(&PEOPLE_ACTS)),
            _ => format!("which famous figure {}", rng.pick(&PEOPLE_ACTS)),
        },
        "LOC" => match rng.below(5) {
            0 => format!("where is {} located", rng.pick(&PLACES)),
            1 => format!("what country is {} in", rng.pick(&PLACES)),
            2 => format!("in which city is {}", rng.pick(&PLACES)),
            3 => format!("where can you find {}", rng.pick(&PLACES)),
            _ => format!("what continent is {} on", rng.pick(&PLACES)),
        },
        _ => match rng.below(5) {
            0 => format!("when did {} begin", rng.pick(&EVENTS)),
            1 => format!("how many people died in {}", rng.pick(&EVENTS)),
            2 => format!("what year did {} end", rng.pick(&EVENTS)),
            3 => format!("how many years did {} last", rng.pick(&EVENTS)),
            _ => format!("how many countries took part in {}", rng.pick(&EVENTS)),
        },
    };
    tidy(&s)
}

pub fn trec_generated(rng: &mut Rng, label: &str) -> String {
    let s = match label {
        "ABBR" => match rng.below(3) {
            0 => format!("What does the abbreviation {} mean?", rng.pick(&ABBRS).to_uppercase()),
            1 => format!("What is {} short for?", rng.pick(&ABBRS).to_uppercase()),
            _ => format!("What do the letters {} stand for?", rng.pick(&ABBRS).to_uppercase()),
        },
        "ENTY" => format!("Which {} {}?", rng.pick(&ENTITIES), rng.pick(&ENTITY_CONTEXTS)),
        "DESC" => match rng.below(3) {
            0 => format!("What is {}?", rng.pick(&CONCEPTS)),
            1 => format!("Can you explain {}?", rng.pick(&CONCEPTS)),
            _ => format!("Why does {} matter?", rng.pick(&CONCEPTS)),
        },
        "HUM" => match rng.below(2) {
            0 => format!("Who {}?", rng.pick(&PEOPLE_ACTS)),
            _ => format!("What was the name of the person who {}?", rng.pick(&PEOPLE_ACTS)),
        },
        "LOC" => match rng.below(3) {
            0 => format!("Where was {} located?", title_case(rng.pick(&PLACES))),
            1 => format!("In which region can you find {}?", title_case(rng.pick(&PLACES))),
            _ => format!("Where would I travel to see {}?", title_case(rng.pick(&PLACES))),
        },
        _ => match rng.below(3) {
            0 => format!("In what year did {} start?", rng.pick(&EVENTS)),
            1 => format!("How long did {} last?", rng.pick(&EVENTS)),
            _ => format!("How many years ago was {}?", rng.pick(&EVENTS)),
        },
    };
    tidy(&s)
}

fn title_case(s: &str) -> String {
    s.split(' ')
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn tidy(s: &str) -> String {
    let mut out = s.split_whitespace().collect::<Vec<_>>().join(" ");
    for p in [" .", " ,", " ?"] {
        out = out.replace(p, &p[1..]);
    }
    out
}

/// Task and label a zero-shot class prompt asks for, judged from its wording.
pub fn classify_prompt(prompt: &str) -> Option<(&'static str, &'static str)> {
    let p = prompt.to_lowercase();
    let rules: [(&str, &str, &str); 15] = [
        ("positive reviews", "sst2", "positive"),
        ("negative reviews", "sst2", "negative"),
        ("rate a random book", "snips", "RateBook"),
        ("add music to a playlist", "snips", "AddToPlaylist"),
        ("play a music", "snips", "PlayMusic"),
        ("book a restaurant", "snips", "BookRestaurant"),
        ("about the weather", "snips", "GetWeather"),
        ("specific creative work", "snips", "SearchCreativeWork"),
        ("screening in the theater", "snips", "SearchScreeningEvent"),
        ("meaning of an abbreviation", "trec", "ABBR"),
        ("noun or entity", "trec", "ENTY"),
        ("query for a definition", "trec", "DESC"),
        ("person or people", "trec", "HUM"),
        ("location of a place", "trec", "LOC"),
        ("numeric fact", "trec", "NUM"),
    ];
    rules.iter().find(|(k, _, _)| p.contains(k)).map(|&(_, t, l)| (t, l))
}

pub fn generated_sentence(rng: &mut Rng, task: &str, label: &str) -> String {
    match task {
        "sst2" => sst2_generated(rng, label),
        "snips" => snips_generated(rng, label),
        _ => trec_generated(rng, label),
    }
}

pub fn fixture_sentence(rng: &mut Rng, task: &str, label: &str) -> String {
    match task {
        "sst2" => sst2_fixture(rng, label),
        "snips" => snips_fixture(rng, label),
        _ => trec_fixture(rng, label),
    }
}

const SWAPS: [(&str, &str); 14] = [
    ("movie", "film"), ("film", "picture"), ("story", "tale"), ("find", "search for"), ("show", "display"),
    ("play", "put on"), ("book", "reserve"), ("tell", "let"), ("what", "which"), ("is", "seems"),
    ("great", "excellent"), ("awful", "terrible"), ("boring", "dull"), ("add", "put"),
];
const FRAMES: [&str; 6] = ["{s}", "I think {s}", "{s}, honestly", "Basically, {s}", "In short, {s}", "To put it simply, {s}"];

/// The `variant`-th paraphrase of `sentence`.
pub fn paraphrase(sentence: &str, variant: u64, salt: u64) -> String {
    let base = sentence.trim().trim_end_matches(['.', '?', '!']);
    let words: Vec<String> = base
        .split_whitespace()
        .enumerate()
        .map(|(i, w)| {
            let lower = w.to_lowercase();
            match SWAPS.iter().find(|(a, _)| *a == lower) {
                Some((_, b)) if crate::mix(salt ^ variant, i as u64).is_multiple_of(2) => b.to_string(),
                _ => w.to_string(),
            }
        })
        .collect();
    let frame = FRAMES[(variant as usize) % FRAMES.len()];
    tidy(&frame.replace("{s}", &words.join(" ")))
}
