"""Small tasks whose whole hypothesis space can be enumerated and tested."""

from lff.taskfile import parse_task

LAST = """
name last.
head last/2.
type last(list,int).
direction last(in,out).
max_clauses 2.
max_body 3.
max_vars 3.
recursion true.
builtin head.
builtin tail.
builtin empty.
pos last([4,7,9],9).
pos last([1],1).
pos last([5,3],3).
pos last([8,8,2,6],6).
neg last([4,7,9],7).
neg last([4,7,9],4).
neg last([5,3],5).
neg last([8,8,2,6],8).
"""

GRANDPARENT = """
name grandparent.
head grandparent/2.
max_clauses 1.
max_body 3.
max_vars 3.
fact parent(ann,bob).
fact parent(bob,cal).
fact parent(bob,dee).
fact parent(cal,eve).
fact parent(dee,fay).
fact female(ann).
fact female(dee).
fact female(eve).
fact female(fay).
pos grandparent(ann,cal).
pos grandparent(ann,dee).
pos grandparent(bob,eve).
pos grandparent(bob,fay).
neg grandparent(ann,bob).
neg grandparent(bob,cal).
neg grandparent(cal,eve).
neg grandparent(ann,eve).
neg grandparent(cal,ann).
"""

PARENT = """
name parent.
head parent/2.
max_clauses 2.
max_body 2.
max_vars 2.
fact mother(ann,bob).
fact mother(ann,cal).
fact father(dan,bob).
fact father(eli,dan).
fact married(dan,ann).
pos parent(ann,bob).
pos parent(ann,cal).
pos parent(dan,bob).
pos parent(eli,dan).
neg parent(bob,ann).
neg parent(dan,ann).
neg parent(bob,cal).
neg parent(cal,ann).
"""

FIRST_EVEN = """
name first_even.
head f/1.
type f(list).
direction f(in).
max_clauses 1.
max_body 3.
max_vars 3.
builtin head.
builtin tail.
builtin even.
builtin odd.
builtin zero.
builtin empty.
pos f([2,3,5]).
pos f([4]).
pos f([8,1]).
neg f([1,2]).
neg f([3]).
neg f([5,4,2]).
neg f([]).
"""

ANCESTOR = """
name ancestor.
head anc/2.
max_clauses 2.
max_body 2.
max_vars 3.
recursion true.
fact par(a,b).
fact par(b,c).
fact par(c,d).
fact par(d,e).
fact old(a).
fact old(b).
pos anc(a,b).
pos anc(a,c).
pos anc(a,e).
pos anc(b,d).
pos anc(c,e).
neg anc(b,a).
neg anc(c,a).
neg anc(e,d).
neg anc(a,a).
neg anc(c,c).
"""

SOURCES = {"last": LAST, "grandparent": GRANDPARENT, "parent": PARENT,
           "first_even": FIRST_EVEN, "ancestor": ANCESTOR}


def micro_task(name: str):
    return parse_task(SOURCES[name], name)


def micro_tasks():
    return [micro_task(n) for n in SOURCES]
