"""Built-in task definitions: label sets, metrics and language routing data.

Label orders follow the released datasets' label-index files so that
confidence vectors are comparable across runs and checkpoints.
"""

SENTIMENT_LABELS = ["negative", "neutral", "positive"]
EMOTION_LABELS = ["anger", "joy", "optimism", "sadness"]
IRONY_LABELS = ["non_irony", "irony"]
HATE_LABELS = ["not_hate", "hate"]
OFFENSIVE_LABELS = ["not_offensive", "offensive"]
STANCE_LABELS = ["none", "against", "favor"]

# 20 emoji classes, in dataset label-index order.
EMOJI_LABELS = [
    "❤",        # red heart
    "\U0001F60D",    # smiling face with heart-eyes
    "\U0001F602",    # face with tears of joy
    "\U0001F495",    # two hearts
    "\U0001F525",    # fire
    "\U0001F60A",    # smiling face with smiling eyes
    "\U0001F60E",    # smiling face with sunglasses
    "✨",        # sparkles
    "\U0001F499",    # blue heart
    "\U0001F618",    # face blowing a kiss
    "\U0001F4F7",    # camera
    "\U0001F1FA\U0001F1F8",  # US flag
    "☀",        # sun
    "\U0001F49C",    # purple heart
    "\U0001F609",    # winking face
    "\U0001F4AF",    # hundred points
    "\U0001F601",    # beaming face
    "\U0001F384",    # christmas tree
    "\U0001F4F8",    # camera with flash
    "\U0001F61C",    # winking face with tongue
]

# 19 topic classes, in dataset label-index order.
TOPIC_LABELS = [
    "arts_&_culture",
    "business_&_entrepreneurs",
    "celebrity_&_pop_culture",
    "diaries_&_daily_life",
    "family",
    "fashion_&_style",
    "film_tv_&_video",
    "fitness_&_health",
    "food_&_dining",
    "gaming",
    "learning_&_educational",
    "music",
    "news_&_social_concern",
    "other_hobbies",
    "relationships",
    "science_&_technology",
    "sports",
    "travel_&_adventure",
    "youth_&_student_life",
]

# 7 entity types, from the released NER model's label file.
NER_ENTITY_TYPES = [
    "corporation",
    "creative_work",
    "event",
    "group",
    "location",
    "person",
    "product",
]

STANCE_TARGETS = ["abortion", "atheism", "climate", "feminist", "hillary"]

# Languages supported by both the multilingual sentiment model and the
# upstream search API (BCP-47 primary subtags).
MULTILINGUAL_SENTIMENT_CODES = [
    "am", "ar", "hy", "eu", "bn", "bg", "my", "ca", "zh", "cs", "da", "dv",
    "nl", "et", "fi", "fr", "ka", "de", "el", "ht", "he", "hi", "hu", "is",
    "id", "it", "ja", "kn", "km", "ko", "ku", "lo", "lv", "lt", "ml", "mr",
    "ne", "no", "or", "pa", "fa", "pl", "ps", "ro", "ru", "sr", "sd", "si",
    "sl", "es", "sv", "tl", "ta", "te", "th", "tr", "ug", "uk", "ur", "vi",
    "cy",
]
