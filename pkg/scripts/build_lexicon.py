#!/usr/bin/env python3
"""Generate the packaged English inflection lexicon (data/inflections.tsv).

Regular inflection rules plus irregular tables over a curated common-lemma
list. Desk-scale by design: the lexicon path is a config value, so richer
tables can be substituted without code changes.

Usage: python scripts/build_lexicon.py [out_path]
"""
from __future__ import annotations

import sys
from pathlib import Path

VOWELS = "aeiou"

# lemma: past, past participle (other verb forms are rule-regular)
IRREGULAR_VERBS = {
    "arise": ("arose", "arisen"), "awake": ("awoke", "awoken"), "be": ("was", "been"),
    "bear": ("bore", "borne"), "beat": ("beat", "beaten"), "become": ("became", "become"),
    "begin": ("began", "begun"), "bend": ("bent", "bent"), "bet": ("bet", "bet"),
    "bid": ("bid", "bid"), "bind": ("bound", "bound"), "bite": ("bit", "bitten"),
    "bleed": ("bled", "bled"), "blow": ("blew", "blown"), "break": ("broke", "broken"),
    "breed": ("bred", "bred"), "bring": ("brought", "brought"),
    "broadcast": ("broadcast", "broadcast"), "build": ("built", "built"),
    "burn": ("burnt", "burned"), "burst": ("burst", "burst"), "buy": ("bought", "bought"),
    "cast": ("cast", "cast"), "catch": ("caught", "caught"), "choose": ("chose", "chosen"),
    "cling": ("clung", "clung"), "come": ("came", "come"), "cost": ("cost", "cost"),
    "creep": ("crept", "crept"), "cut": ("cut", "cut"), "deal": ("dealt", "dealt"),
    "dig": ("dug", "dug"), "dive": ("dove", "dived"), "do": ("did", "done"),
    "draw": ("drew", "drawn"), "dream": ("dreamt", "dreamed"), "drink": ("drank", "drunk"),
    "drive": ("drove", "driven"), "dwell": ("dwelt", "dwelt"), "eat": ("ate", "eaten"),
    "fall": ("fell", "fallen"), "feed": ("fed", "fed"), "feel": ("felt", "felt"),
    "fight": ("fought", "fought"), "find": ("found", "found"), "flee": ("fled", "fled"),
    "fling": ("flung", "flung"), "fly": ("flew", "flown"), "forbid": ("forbade", "forbidden"),
    "forecast": ("forecast", "forecast"), "forget": ("forgot", "forgotten"),
    "forgive": ("forgave", "forgiven"), "forsake": ("forsook", "forsaken"),
    "freeze": ("froze", "frozen"), "get": ("got", "gotten"), "give": ("gave", "given"),
    "go": ("went", "gone"), "grind": ("ground", "ground"), "grow": ("grew", "grown"),
    "hang": ("hung", "hung"), "have": ("had", "had"), "hear": ("heard", "heard"),
    "hide": ("hid", "hidden"), "hit": ("hit", "hit"), "hold": ("held", "held"),
    "hurt": ("hurt", "hurt"), "keep": ("kept", "kept"), "kneel": ("knelt", "knelt"),
    "know": ("knew", "known"), "lay": ("laid", "laid"), "lead": ("led", "led"),
    "lean": ("leant", "leaned"), "leap": ("leapt", "leaped"), "learn": ("learnt", "learned"),
    "leave": ("left", "left"), "lend": ("lent", "lent"), "let": ("let", "let"),
    "lie": ("lay", "lain"), "light": ("lit", "lit"), "lose": ("lost", "lost"),
    "make": ("made", "made"), "mean": ("meant", "meant"), "meet": ("met", "met"),
    "mistake": ("mistook", "mistaken"), "mow": ("mowed", "mown"),
    "overcome": ("overcame", "overcome"), "overtake": ("overtook", "overtaken"),
    "pay": ("paid", "paid"), "prove": ("proved", "proven"), "put": ("put", "put"),
    "quit": ("quit", "quit"), "read": ("read", "read"), "rid": ("rid", "rid"),
    "ride": ("rode", "ridden"), "ring": ("rang", "rung"), "rise": ("rose", "risen"),
    "run": ("ran", "run"), "say": ("said", "said"), "see": ("saw", "seen"),
    "seek": ("sought", "sought"), "sell": ("sold", "sold"), "send": ("sent", "sent"),
    "set": ("set", "set"), "sew": ("sewed", "sewn"), "shake": ("shook", "shaken"),
    "shed": ("shed", "shed"), "shine": ("shone", "shone"), "shoot": ("shot", "shot"),
    "show": ("showed", "shown"), "shrink": ("shrank", "shrunk"), "shut": ("shut", "shut"),
    "sing": ("sang", "sung"), "sink": ("sank", "sunk"), "sit": ("sat", "sat"),
    "slay": ("slew", "slain"), "sleep": ("slept", "slept"), "slide": ("slid", "slid"),
    "sling": ("slung", "slung"), "smell": ("smelt", "smelled"), "sow": ("sowed", "sown"),
    "speak": ("spoke", "spoken"), "speed": ("sped", "sped"), "spell": ("spelt", "spelled"),
    "spend": ("spent", "spent"), "spill": ("spilt", "spilled"), "spin": ("spun", "spun"),
    "spit": ("spat", "spat"), "split": ("split", "split"), "spoil": ("spoilt", "spoiled"),
    "spread": ("spread", "spread"), "spring": ("sprang", "sprung"),
    "stand": ("stood", "stood"), "steal": ("stole", "stolen"), "stick": ("stuck", "stuck"),
    "sting": ("stung", "stung"), "stink": ("stank", "stunk"), "stride": ("strode", "stridden"),
    "strike": ("struck", "struck"), "strive": ("strove", "striven"),
    "swear": ("swore", "sworn"), "sweep": ("swept", "swept"), "swell": ("swelled", "swollen"),
    "swim": ("swam", "swum"), "swing": ("swung", "swung"), "take": ("took", "taken"),
    "teach": ("taught", "taught"), "tear": ("tore", "torn"), "tell": ("told", "told"),
    "think": ("thought", "thought"), "throw": ("threw", "thrown"),
    "thrust": ("thrust", "thrust"), "tread": ("trod", "trodden"),
    "undergo": ("underwent", "undergone"), "understand": ("understood", "understood"),
    "undertake": ("undertook", "undertaken"), "upset": ("upset", "upset"),
    "wake": ("woke", "woken"), "wear": ("wore", "worn"), "weave": ("wove", "woven"),
    "weep": ("wept", "wept"), "win": ("won", "won"), "wind": ("wound", "wound"),
    "withdraw": ("withdrew", "withdrawn"), "withstand": ("withstood", "withstood"),
    "wring": ("wrung", "wrung"), "write": ("wrote", "written"),
}

# extra forms (vs. the rule output) for special verbs
EXTRA_VERB_FORMS = {
    "be": {"am", "is", "are", "were", "being"},
    "have": {"has"},
    "do": {"does"},
    "go": {"goes"},
}

IRREGULAR_NOUNS = {
    "analysis": "analyses", "appendix": "appendices", "axis": "axes", "basis": "bases",
    "child": "children", "crisis": "crises", "criterion": "criteria", "datum": "data",
    "diagnosis": "diagnoses", "foot": "feet", "goose": "geese", "half": "halves",
    "hypothesis": "hypotheses", "knife": "knives", "leaf": "leaves", "life": "lives",
    "loaf": "loaves", "man": "men", "matrix": "matrices", "medium": "media",
    "mouse": "mice", "oasis": "oases", "person": "people", "phenomenon": "phenomena",
    "self": "selves", "series": "series", "sheep": "sheep", "shelf": "shelves",
    "species": "species", "thesis": "theses", "thief": "thieves", "tooth": "teeth",
    "wife": "wives", "wolf": "wolves", "woman": "women",
}

# verbs whose final consonant doubles despite having more than one vowel group
DOUBLING_EXCEPTIONS = {
    "admit", "commit", "compel", "confer", "control", "defer", "emit", "equip",
    "excel", "forget", "incur", "infer", "occur", "omit", "patrol", "permit",
    "prefer", "propel", "rebel", "recur", "refer", "regret", "remit", "submit",
    "transfer", "transmit", "upset",
}

REGULAR_VERBS = """
accept accompany accuse ache achieve acknowledge acquire act adapt add address adjust admire
admit adopt advance advise affect afford agree aid aim alert allege allocate allow alter amaze
amend announce annoy answer anticipate apologize appeal appear applaud apply appoint appreciate
approach approve argue arrange arrest arrive ask assemble assert assess assign assist assume
assure attach attack attempt attend attract avoid award back bake balance ban bang base bat
bathe battle beg behave believe belong benefit blame blast blend bless block boast boil bolt
bomb book boost border bother bounce bow brag brake branch breathe bribe brief brush bubble
bump bury calculate call calm camp care carry carve cause celebrate challenge change charge
chase chat cheat check cheer chew chop cite claim clarify classify clean clear climb clip
close coach collapse collect combine comfort command comment communicate compare compete
compile complain complete compose compute conceal concede conceive concentrate concern
conclude condemn conduct confess confirm confront confuse connect consent consider consist
console consult consume contact contain continue contract contrast contribute convert convey
convince cook cooperate coordinate copy correct corroborate cough count cover crack crash
crawl create credit cross crush cry cultivate cure curl cycle damage dance dare debate decay
deceive decide declare decline decorate decrease dedicate defeat defend define delay delegate
delete delight deliver demand demonstrate deny depart depend depict deposit describe deserve
design desire destroy detail detect determine develop devise devote differ diminish dine dip
direct disagree disappear disappoint discard discover discuss dislike dismiss display dispose
dispute dissolve distinguish distribute disturb divert divide document dodge dominate donate
double doubt drag drain dress drift drill drip drop drown dry dump earn ease echo edit educate
elect eliminate embrace emerge emphasize employ enable enclose encounter encourage end endorse
endure enforce engage enhance enjoy enlarge enrich enroll ensure enter entertain entitle escape
establish estimate evaluate evoke examine exceed exchange exclaim exclude excuse execute
exercise exhaust exhibit exist expand expect experience explain explode explore export expose
express extend face fade fail fasten favor fear feature file fill film filter finish fire fit
fix flash float flood flow fold follow force forge form found frame frighten fry fulfill
function fund gain gather gaze generate glance glow govern grab grant greet grip guarantee
guard guess guide hammer hand handle happen harm harvest hate haul head heal heat help
hesitate hire honor hop hope hug hunt hurry identify ignore illustrate imagine imitate
implement imply import impose impress improve include increase indicate infer inflate inform
inhabit inherit injure insert insist inspect inspire install insult insure integrate intend
interact interfere interpret interrupt introduce invade invent invest investigate invite
involve iron isolate issue join joke judge jump justify kick kill kiss knock label lack land
last laugh launch learn lease lecture level license lick lift like limit link list listen
live load locate lock log look love lower maintain manage manipulate march mark marry match
matter measure melt mention merge migrate mind mine miss mix modify monitor motivate mount
move multiply murder name narrate need neglect negotiate nod nominate note notice notify
number obey object observe obtain occupy offend offer open operate oppose order organize
outline overlap overlook owe own pack paint park participate pass paste pause perform permit
persist persuade pick picture pile pin pitch place plan plant play plead please pledge plot
plunge point polish pollute pop pose possess post postpone pour practice praise pray preach
precede predict prefer prepare present preserve press pretend prevail prevent print proceed
process proclaim produce profit progress prohibit promise promote prompt pronounce propose
protect protest provide provoke publish pull pump punch punish purchase pursue push qualify
question queue quote race raise rank rate reach react realize reassure recall receive recite
reckon recognize recommend record recover recruit reduce refer reflect reform refresh refuse
regard register regret regulate rehearse reinforce reject relate relax release relieve rely
remain remark remember remind remove render rent repair repeat replace reply report represent
request require rescue research resemble reserve reside resign resist resolve respect respond
restore restrict result resume retain retire retreat return reveal review revise revive
reward rip risk roar roast rob rock roll rot rotate rub ruin rule rush sail sample satisfy
save scan scare scatter schedule scold scoop score scrape scratch scream seal search seat
secure seem seize select separate serve settle shape share shave shift ship shock shop shout
shove shrug sigh sign signal simplify sip ski skip slam slap slice slip smash smile smoke
snap sneeze soak solve sort sound spare spark specify speculate spell spill splash sponsor
spot spray sprint spy squeeze stare start starve state stay steer stem step stir stitch stop
store strain stress stretch struggle study stuff stumble submit substantiate substitute
succeed suck suffer suggest suit summarize supply support suppose surge surprise surrender
surround survey survive suspect suspend sustain swallow swap switch tackle tag talk tame tap
taste tease tempt tend terminate test thank threaten thrill tick tie tighten tip toast
tolerate toss touch tour trace track trade train transfer transform translate transport trap
travel treat tremble trick trigger trim trip trust try tune turn twist type undermine unfold
unite unload unlock update upgrade uphold urge use utter validate value vanish vary venture
verify view visit voice vote vow wait walk wander want warm warn wash waste watch watch wave
weigh welcome whisper widen wipe wish wonder work worry wrap wreck yell yield zoom
""".split()

NOUNS = """
ability absence account act action activity advance advantage advice age agency agreement
aim air amount analysis answer apartment apple area argument arm army arrival art article
aspect attack attempt attention attitude audience author authority baby back balance ball
bank base basis battle beach bed beginning behavior belief benefit bird birth block blood
board boat body book border bottle bottom box boy branch bread break brother budget building
bus business call camp campaign candidate capital car card care career case cat category
cause cell center century chain chair chance change chapter character charge check chest
chicken child choice church circle citizen city claim class climate club coach coast coffee
collection college color committee community company comparison competition computer concept
concern conclusion condition conference conflict connection consequence construction contact
content contest context contract contrast control conversation cost country couple course
court cousin credit crime crisis criticism crowd culture cup currency customer cycle danger
data date daughter day deal death debate debt decade decision defense degree demand department
deposit depth description design desire desk detail development device difference difficulty
dinner direction discussion disease distance distribution district doctor document dog door
doubt draft drama dream dress drink driver drug duty ear earth economy edge editor education
effect effort egg election element emergency emotion emphasis employee employer end enemy
energy engine entrance environment episode equipment error estate event evidence exam example
exchange exercise exit experience expert explanation expression extent eye face fact factor
factory failure faith family fan farm father fault feature fee feeling field figure file
finding finger fire firm fish flight floor flow flower focus food foot force forest form
fortune foundation frame friend front fruit fuel function fund future game gap garden gas
gate gene gift girl glass goal gold government grade grass ground group growth guard guest
guide gun habit hair hall hand harm hat head health heart heat height hell help hill history
hole holiday home honey hope horse hospital hotel hour house husband idea image impact
importance income increase indication individual industry influence information initiative
injury insect instance institution insurance intention interest introduction investment
island issue item job joint judge juice key kid king kitchen knee knowledge lab label lack
lake land language law lawyer leader league leave lecture leg length lesson letter level
library life light limit line link lip list literature location lock look loss love lunch
machine magazine mail majority man management manager manner map margin mark market marriage
master match material matter meal meaning measure meat medicine meeting member memory message
metal method middle milk mind minister minute mirror mission mistake model moment money month
mood morning mother motion mountain mouse mouth move movement movie muscle music name nation
nature neck need network news night noise north nose note notice number object objective
observation occasion offer office officer oil operation opinion opportunity option order
organization outcome output owner page pain painting pair paper parent park part partner
party passage passenger path patient pattern payment peace penalty people percentage period
permission person phase phone photo phrase piece pilot pitch place plan plane plant plate
platform player pleasure plenty poem poet point police policy politics pool population
position possibility pot potato power practice presence president pressure price priest
principle print priority prison problem procedure process product profession professor profile
profit program project promise proof property proposal protection purpose quality quantity
quarter queen question rain range rate ratio reaction reader reason recipe record region
relation relationship religion report republic request research resident resource response
rest result return revenue review reward rhythm rice ring risk river road rock role roof room
root rose route routine rule safety salad salary sale salt sample scale scene schedule scheme
school science score screen sea season seat second secret secretary section sector security
selection self sense sentence sequence series session shape shift ship shoe shop shoulder
show side sign signal significance silver sister site situation size skill sky sleep smoke
society solution song sound source space speaker speech speed spirit sport spot spring square
stage standard star start state statement station status step stock stomach stone store storm
story strategy street strength stress structure student studio study stuff style subject
substance success sugar suggestion summer sun supply surface surgery surprise survey system
table target task tax tea teacher team technique technology telephone television temperature
tendency tension term test text theme theory thing thought threat throat ticket time tip
title tone tongue tool tooth top topic total touch tour tower town track trade tradition
traffic train transition treatment tree trend trial trigger trip truck trust truth turn type
uncle union unit university user valley value variation variety vehicle version victim
victory video view village violence vision visit voice volume wall war warning watch water
wave way wealth weather week weekend weight west wheel wife wind window wine winner winter
woman wood word worker world worry wound writer writing yard year youth zone
""".split()

ADJECTIVES = """
able active actual afraid alive angry annual anxious appropriate available average aware bad
basic beautiful big bitter blind bold brave brief bright broad busy calm capable careful
cautious certain cheap civil clean clear clever close cold comfortable common complete
complex confident conscious consistent constant convenient cool correct crazy critical crude
curious current cute dark dead deaf dear decent deep dense dirty distant double dramatic dry
dull dumb eager early easy effective efficient elderly electric emotional empty entire equal
exact excellent expensive fair faithful false familiar famous fancy far fast fat fierce final
fine firm fit flat flexible fond foolish foreign formal frank free frequent fresh friendly
full funny gentle genuine glad global good grand grateful great green gross guilty happy
hard harsh healthy heavy helpful high hollow holy honest hot huge humble hungry ideal ill
immediate important impressive informal inner innocent intense internal jealous joint keen
kind large late lazy legal liable light likely limited little lively local logical lonely
long loose loud low loyal lucky mad main major mature mean mental mild military minor mobile
modern modest moral mutual naked narrow nasty native natural near neat necessary nervous new
nice noble normal obvious odd official old only open ordinary original outer overall pale
particular passive patient peaceful perfect permanent personal physical plain pleasant polite
poor popular positive possible powerful practical precious precise pregnant present pretty
previous primary prime private probable proper proud public pure quick quiet rapid rare raw
ready real reasonable recent regular relevant reliable remote rich ripe rough round royal
rude rural sad safe secure senior sensible sensitive separate serious severe sharp shiny
short shy sick significant silent silly similar simple sincere single slight slow small
smart smooth soft solid sore sorry sour spare special specific stable steady steep stiff
still strange strict strong stupid subtle sudden sufficient suitable sweet swift tall tender
terrible thick thin tight tiny tired total tough tropical typical ugly unique universal
urban urgent useful usual vague valid valuable vast violent visible vital warm weak wealthy
weird wet whole wide wild willing wise wooden wrong young
""".split()


def is_vowel(ch: str) -> bool:
    return ch in VOWELS


def vowel_groups(word: str) -> int:
    count, prev = 0, False
    for ch in word:
        cur = ch in VOWELS or ch == "y"
        if cur and not prev:
            count += 1
        prev = cur
    return count


def doubles_final(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (word[-1] not in VOWELS + "wxy" and is_vowel(word[-2]) and not is_vowel(word[-3])):
        return False
    return vowel_groups(word) == 1 or word in DOUBLING_EXCEPTIONS


def third_singular(verb: str) -> str:
    if verb.endswith("y") and not is_vowel(verb[-2]):
        return verb[:-1] + "ies"
    if verb.endswith(("s", "x", "z", "ch", "sh", "o")):
        return verb + "es"
    return verb + "s"


def gerund(verb: str) -> str:
    if verb.endswith("ie"):
        return verb[:-2] + "ying"
    if verb.endswith("e") and not verb.endswith(("ee", "oe", "ye")):
        return verb[:-1] + "ing"
    if doubles_final(verb):
        return verb + verb[-1] + "ing"
    return verb + "ing"


def regular_past(verb: str) -> str:
    if verb.endswith("e"):
        return verb + "d"
    if verb.endswith("y") and not is_vowel(verb[-2]):
        return verb[:-1] + "ied"
    if doubles_final(verb):
        return verb + verb[-1] + "ed"
    return verb + "ed"


def pluralize(noun: str) -> str:
    if noun in IRREGULAR_NOUNS:
        return IRREGULAR_NOUNS[noun]
    if noun.endswith("y") and not is_vowel(noun[-2]):
        return noun[:-1] + "ies"
    if noun.endswith(("s", "x", "z", "ch", "sh")):
        return noun + "es"
    return noun + "s"


def verb_forms(verb: str) -> set[str]:
    forms = {verb, third_singular(verb), gerund(verb)}
    if verb in IRREGULAR_VERBS:
        forms.update(IRREGULAR_VERBS[verb])
    else:
        forms.add(regular_past(verb))
    forms.update(EXTRA_VERB_FORMS.get(verb, set()))
    return forms


def adjective_forms(adj: str) -> set[str]:
    forms = {adj}
    gradable = adj.endswith("y") or len(adj) <= 5
    if not gradable:
        return forms
    if adj.endswith("e"):
        forms.update({adj + "r", adj + "st"})
    elif adj.endswith("y") and not is_vowel(adj[-2]):
        forms.update({adj[:-1] + "ier", adj[:-1] + "iest"})
    elif doubles_final(adj):
        forms.update({adj + adj[-1] + "er", adj + adj[-1] + "est"})
    else:
        forms.update({adj + "er", adj + "est"})
    return forms


def build_entries() -> dict[tuple[str, str], set[str]]:
    entries: dict[tuple[str, str], set[str]] = {}
    for verb in set(REGULAR_VERBS) | set(IRREGULAR_VERBS):
        entries[(verb, "v")] = verb_forms(verb)
    for noun in set(NOUNS) | set(IRREGULAR_NOUNS):
        entries[(noun, "n")] = {noun, pluralize(noun)}
    for adj in set(ADJECTIVES):
        entries[(adj, "a")] = adjective_forms(adj)
    return entries


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "paraspan" / "data" / "inflections.tsv"
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    entries = build_entries()
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("# lemma<TAB>pos<TAB>comma-separated inflected forms\n")
        for (lemma, pos) in sorted(entries):
            forms = ",".join(sorted(entries[(lemma, pos)]))
            fh.write(f"{lemma}\t{pos}\t{forms}\n")
    print(f"wrote {len(entries)} entries to {out}")


if __name__ == "__main__":
    main()
