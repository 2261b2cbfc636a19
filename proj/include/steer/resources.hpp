#pragma once

// Generated by tools/embed_resources.py from resources/. Do not edit.

#include <string_view>

namespace steer::resources {

// pos_lexicon.tsv
inline constexpr std::string_view kPosLexicon = R"steer(# token	tag (lowercase token; later lines override earlier ones)
a	ART
an	ART
the	ART
i	PRON
me	PRON
my	PRON
mine	PRON
myself	PRON
you	PRON
your	PRON
yours	PRON
yourself	PRON
yourselves	PRON
he	PRON
him	PRON
his	PRON
himself	PRON
she	PRON
her	PRON
hers	PRON
herself	PRON
it	PRON
its	PRON
itself	PRON
we	PRON
us	PRON
our	PRON
ours	PRON
ourselves	PRON
they	PRON
them	PRON
their	PRON
theirs	PRON
themselves	PRON
who	PRON
whom	PRON
whose	PRON
whoever	PRON
whatever	PRON
someone	PRON
anyone	PRON
everyone	PRON
nobody	PRON
something	PRON
anything	PRON
everything	PRON
nothing	PRON
somebody	PRON
anybody	PRON
everybody	PRON
oneself	PRON
of	ADP
in	ADP
to	ADP
for	ADP
with	ADP
on	ADP
at	ADP
by	ADP
from	ADP
about	ADP
as	ADP
into	ADP
through	ADP
after	ADP
over	ADP
between	ADP
against	ADP
during	ADP
without	ADP
before	ADP
under	ADP
around	ADP
among	ADP
upon	ADP
within	ADP
along	ADP
across	ADP
behind	ADP
beyond	ADP
toward	ADP
towards	ADP
despite	ADP
except	ADP
inside	ADP
outside	ADP
onto	ADP
per	ADP
via	ADP
ago	ADP
hence	ADP
throughout	ADP
beneath	ADP
beside	ADP
besides	ADP
underneath	ADP
unlike	ADP
amid	ADP
amongst	ADP
versus	ADP
near	ADP
till	ADP
until	ADP
since	ADP
off	ADP
out	ADP
up	ADP
down	ADP
above	ADP
below	ADP
like	ADP
oh	INTJ
wow	INTJ
hey	INTJ
hi	INTJ
hello	INTJ
yeah	INTJ
yep	INTJ
nope	INTJ
ok	INTJ
okay	INTJ
oops	INTJ
ah	INTJ
aha	INTJ
uh	INTJ
um	INTJ
hmm	INTJ
alas	INTJ
ouch	INTJ
bye	INTJ
goodbye	INTJ
thanks	INTJ
please	INTJ
lol	INTJ
yay	INTJ
huh	INTJ
ugh	INTJ
whoa	INTJ
be	VERB
am	VERB
is	VERB
are	VERB
was	VERB
were	VERB
been	VERB
being	VERB
have	VERB
has	VERB
had	VERB
having	VERB
do	VERB
does	VERB
did	VERB
done	VERB
doing	VERB
will	VERB
would	VERB
shall	VERB
should	VERB
can	VERB
could	VERB
may	VERB
might	VERB
must	VERB
ought	VERB
get	VERB
gets	VERB
got	VERB
gotten	VERB
getting	VERB
go	VERB
goes	VERB
went	VERB
gone	VERB
going	VERB
say	VERB
says	VERB
said	VERB
make	VERB
makes	VERB
made	VERB
know	VERB
knows	VERB
knew	VERB
known	VERB
think	VERB
thinks	VERB
thought	VERB
take	VERB
takes	VERB
took	VERB
taken	VERB
see	VERB
sees	VERB
saw	VERB
seen	VERB
come	VERB
comes	VERB
came	VERB
want	VERB
look	VERB
use	VERB
find	VERB
found	VERB
give	VERB
gave	VERB
given	VERB
tell	VERB
told	VERB
work	VERB
call	VERB
try	VERB
tried	VERB
ask	VERB
need	VERB
feel	VERB
felt	VERB
become	VERB
became	VERB
leave	VERB
left	VERB
put	VERB
mean	VERB
meant	VERB
keep	VERB
kept	VERB
let	VERB
begin	VERB
began	VERB
begun	VERB
seem	VERB
help	VERB
talk	VERB
turn	VERB
start	VERB
show	VERB
shown	VERB
hear	VERB
heard	VERB
play	VERB
run	VERB
ran	VERB
move	VERB
live	VERB
believe	VERB
hold	VERB
held	VERB
bring	VERB
brought	VERB
happen	VERB
write	VERB
wrote	VERB
written	VERB
provide	VERB
sit	VERB
sat	VERB
stand	VERB
stood	VERB
lose	VERB
lost	VERB
pay	VERB
paid	VERB
meet	VERB
met	VERB
include	VERB
continue	VERB
set	VERB
learn	VERB
change	VERB
lead	VERB
led	VERB
understand	VERB
understood	VERB
watch	VERB
follow	VERB
stop	VERB
create	VERB
speak	VERB
spoke	VERB
spoken	VERB
read	VERB
allow	VERB
add	VERB
spend	VERB
spent	VERB
grow	VERB
grew	VERB
grown	VERB
open	VERB
walk	VERB
win	VERB
won	VERB
offer	VERB
remember	VERB
love	VERB
consider	VERB
appear	VERB
buy	VERB
bought	VERB
wait	VERB
serve	VERB
die	VERB
send	VERB
sent	VERB
expect	VERB
build	VERB
built	VERB
stay	VERB
fall	VERB
fell	VERB
cut	VERB
reach	VERB
kill	VERB
remain	VERB
suggest	VERB
raise	VERB
pass	VERB
sell	VERB
sold	VERB
require	VERB
report	VERB
decide	VERB
pull	VERB
eat	VERB
ate	VERB
eaten	VERB
drink	VERB
drank	VERB
sleep	VERB
slept	VERB
fly	VERB
flew	VERB
drive	VERB
drove	VERB
driven	VERB
wear	VERB
wore	VERB
break	VERB
broke	VERB
broken	VERB
choose	VERB
chose	VERB
chosen	VERB
forget	VERB
forgot	VERB
catch	VERB
caught	VERB
teach	VERB
taught	VERB
fight	VERB
fought	VERB
throw	VERB
threw	VERB
thrown	VERB
sing	VERB
sang	VERB
draw	VERB
drew	VERB
rise	VERB
rose	VERB
hide	VERB
hid	VERB
shake	VERB
shook	VERB
steal	VERB
stole	VERB
swim	VERB
swam	VERB
ride	VERB
rode	VERB
wake	VERB
woke	VERB
're	VERB
've	VERB
'll	VERB
'd	VERB
'm	VERB
not	ADV
n't	ADV
very	ADV
so	ADV
just	ADV
also	ADV
now	ADV
then	ADV
here	ADV
there	ADV
too	ADV
well	ADV
even	ADV
still	ADV
never	ADV
always	ADV
often	ADV
sometimes	ADV
again	ADV
already	ADV
almost	ADV
soon	ADV
perhaps	ADV
maybe	ADV
quite	ADV
rather	ADV
really	ADV
yet	ADV
ever	ADV
once	ADV
away	ADV
back	ADV
however	ADV
therefore	ADV
thus	ADV
instead	ADV
indeed	ADV
else	ADV
later	ADV
today	ADV
tomorrow	ADV
yesterday	ADV
tonight	ADV
together	ADV
anyway	ADV
somewhat	ADV
more	ADV
most	ADV
less	ADV
least	ADV
only	ADV
how	ADV
when	ADV
where	ADV
why	ADV
seldom	ADV
rarely	ADV
hardly	ADV
nearly	ADV
ahead	ADV
afterwards	ADV
furthermore	ADV
moreover	ADV
meanwhile	ADV
otherwise	ADV
nevertheless	ADV
nonetheless	ADV
good	ADJ
new	ADJ
first	ADJ
last	ADJ
long	ADJ
great	ADJ
little	ADJ
own	ADJ
other	ADJ
old	ADJ
right	ADJ
big	ADJ
high	ADJ
different	ADJ
small	ADJ
large	ADJ
next	ADJ
early	ADJ
young	ADJ
important	ADJ
few	ADJ
public	ADJ
bad	ADJ
same	ADJ
able	ADJ
best	ADJ
better	ADJ
sure	ADJ
free	ADJ
true	ADJ
whole	ADJ
real	ADJ
full	ADJ
hard	ADJ
clear	ADJ
simple	ADJ
certain	ADJ
strong	ADJ
possible	ADJ
major	ADJ
human	ADJ
local	ADJ
late	ADJ
special	ADJ
easy	ADJ
short	ADJ
low	ADJ
recent	ADJ
black	ADJ
white	ADJ
red	ADJ
blue	ADJ
green	ADJ
happy	ADJ
poor	ADJ
nice	ADJ
fine	ADJ
main	ADJ
similar	ADJ
hot	ADJ
cold	ADJ
dark	ADJ
likely	ADJ
friendly	ADJ
lovely	ADJ
ugly	ADJ
holy	ADJ
lonely	ADJ
silly	ADJ
elderly	ADJ
deadly	ADJ
costly	ADJ
daily	ADJ
weekly	ADJ
monthly	ADJ
yearly	ADJ
cat	NOUN
dog	NOUN
animal	NOUN
time	NOUN
year	NOUN
people	NOUN
way	NOUN
day	NOUN
man	NOUN
men	NOUN
woman	NOUN
women	NOUN
child	NOUN
children	NOUN
world	NOUN
life	NOUN
hand	NOUN
part	NOUN
place	NOUN
case	NOUN
week	NOUN
company	NOUN
system	NOUN
program	NOUN
question	NOUN
government	NOUN
number	NOUN
night	NOUN
point	NOUN
home	NOUN
water	NOUN
room	NOUN
mother	NOUN
area	NOUN
money	NOUN
story	NOUN
fact	NOUN
month	NOUN
lot	NOUN
study	NOUN
book	NOUN
eye	NOUN
job	NOUN
word	NOUN
business	NOUN
issue	NOUN
side	NOUN
kind	NOUN
head	NOUN
house	NOUN
service	NOUN
friend	NOUN
father	NOUN
power	NOUN
hour	NOUN
game	NOUN
line	NOUN
end	NOUN
member	NOUN
law	NOUN
car	NOUN
city	NOUN
community	NOUN
name	NOUN
president	NOUN
team	NOUN
minute	NOUN
idea	NOUN
kid	NOUN
body	NOUN
information	NOUN
parent	NOUN
face	NOUN
level	NOUN
office	NOUN
door	NOUN
health	NOUN
person	NOUN
art	NOUN
war	NOUN
history	NOUN
party	NOUN
result	NOUN
morning	NOUN
reason	NOUN
research	NOUN
girl	NOUN
boy	NOUN
guy	NOUN
moment	NOUN
air	NOUN
teacher	NOUN
force	NOUN
education	NOUN
family	NOUN
student	NOUN
agent	NOUN
signal	NOUN
supply	NOUN
reply	NOUN
apply	NOUN
rally	NOUN
belly	NOUN
bully	NOUN
jelly	NOUN
and	OTHER
or	OTHER
but	OTHER
nor	OTHER
if	OTHER
because	OTHER
while	OTHER
although	OTHER
though	OTHER
whether	OTHER
than	OTHER
that	OTHER
this	OTHER
these	OTHER
those	OTHER
some	OTHER
any	OTHER
each	OTHER
every	OTHER
all	OTHER
both	OTHER
either	OTHER
neither	OTHER
no	OTHER
many	OTHER
much	OTHER
several	OTHER
such	OTHER
's	OTHER
which	OTHER
what	OTHER
ca	VERB
wo	VERB
sha	VERB
evening	NOUN
ancient	ADJ
everywhere	ADV
somewhere	ADV
anywhere	ADV
nowhere	ADV
)steer";

// syllable_exceptions.tsv
inline constexpr std::string_view kSyllableExceptions = R"steer(# word	syllables
apostrophe	4
area	3
being	2
business	2
camera	3
chocolate	3
client	2
create	2
created	3
cruel	2
diet	2
different	3
doing	2
evening	2
every	2
everybody	4
everyone	3
everything	3
everywhere	3
eye	1
eyes	1
family	3
fire	1
fuel	2
going	2
hour	1
idea	3
ideas	3
interesting	3
likely	2
lion	2
lonely	2
lovely	2
naive	2
once	1
one	1
our	1
people	2
piano	3
poem	2
queue	1
quiet	2
radio	3
react	2
reality	4
recipe	3
riot	2
said	1
science	2
seeing	2
several	3
simile	3
someone	2
something	2
sometimes	2
somewhere	2
the	1
toward	2
user	2
users	2
video	3
)steer";

// boilerplate_patterns.txt
inline constexpr std::string_view kBoilerplatePatterns = R"steer(# One ECMAScript regex per line, matched case-insensitively at the start of the
# response and removed. Applied repeatedly until none match.
^\s*(sure|certainly|of course|absolutely|okay|ok|alright)[,!.]?\s*(here('|’)?s|here is|here are|below is)[^\n]*?(:|\.)[ \t]*\n*
^\s*(sure|certainly|of course|absolutely|okay|ok|alright)[!.,]\s*\n+
^\s*here('|’)?s (the|a|your|my) (rewritten|revised|modified|updated|edited|new|reworded|rephrased)[^\n]*?(:|\.)[ \t]*\n*
^\s*here is (the|a|your|my) (rewritten|revised|modified|updated|edited|new|reworded|rephrased)[^\n]*?(:|\.)[ \t]*\n*
^\s*here are (the|your) (rewritten|revised|modified|updated|edited)[^\n]*?(:|\.)[ \t]*\n*
^\s*below is (the|a|your) (rewritten|revised|modified|updated|edited)[^\n]*?(:|\.)[ \t]*\n*
^\s*the (rewritten|revised|modified|updated|edited) (text|version|passage|story)( is)?\s*:[ \t]*\n*
^\s*(rewritten|revised|modified|updated|edited) (text|version|passage)\s*:[ \t]*\n*
^\s*\*\*(rewritten|revised|modified|updated|edited) (text|version|passage)\*\*\s*:?[ \t]*\n*
^\s*#+\s*(rewritten|revised|modified|updated|edited) (text|version|passage)\s*:?[ \t]*\n+
^\s*i('|’)?ve (rewritten|revised|modified|updated|edited)[^\n]*?(:|\.)[ \t]*\n*
^\s*i have (rewritten|revised|modified|updated|edited)[^\n]*?(:|\.)[ \t]*\n*
^\s*i('|’)?d be (happy|glad) to[^\n]*?(:|\.|!)[ \t]*\n*
^\s*happy to help[^\n]*?(:|\.|!)[ \t]*\n*
^\s*(here you go|there you go)[!.:]?[ \t]*\n*
^\s*this is (the|a|your) (rewritten|revised|modified) [^\n]*?(:|\.)[ \t]*\n*
^\s*as requested[^\n]*?:[ \t]*\n*
^\s*rewrite\s*:[ \t]*\n*
^\s*```[a-z]*[ \t]*\n
^\s*---+[ \t]*\n
)steer";

// underspecified_phrases.txt
inline constexpr std::string_view kUnderspecifiedPhrases = R"steer(higher-quality
better
more polished
more engaging
clearer
more effective
more professional
more compelling
)steer";

// instructions.tsv
inline constexpr std::string_view kInstructions = R"steer(# dimension	direction(+/-)	instruction
reading_difficulty	+	Combine shorter sentences into longer ones using more complex sentence structures.
reading_difficulty	+	Replace common words with more sophisticated, multi-syllable vocabulary.
reading_difficulty	-	Split long sentences into shorter, simpler ones.
reading_difficulty	-	Replace complex words with shorter, everyday alternatives.
formality	+	Reduce the use of contractions.
formality	+	Replace casual expressions with precise, neutral wording.
formality	-	Use contractions and a conversational tone.
formality	-	Address the reader directly and use everyday expressions.
textual_diversity	+	Replace vague or imprecise words with more specific alternatives.
textual_diversity	+	Avoid repeating the same words; vary the vocabulary.
textual_diversity	-	Reuse the same key words instead of introducing synonyms.
textual_diversity	-	Stick to a small set of simple, repeated words.
text_length	+	Add supporting details and elaborate on the main points.
text_length	+	Expand descriptions with additional examples.
text_length	-	Remove redundant details and keep only the main points.
text_length	-	Condense the text into fewer sentences.
)steer";

}  // namespace steer::resources
