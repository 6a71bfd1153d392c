#!/usr/bin/env node
// DIMACS CNF front-end for logic-solver (MiniSat compiled to JS).
// Usage: node solve_dimacs.js [file.cnf]   (reads stdin when no file given)
// Output follows the SAT-competition convention:
//   s SATISFIABLE            exit 10, with "v <lits> 0" model lines
//   s UNSATISFIABLE          exit 20
'use strict';

const fs = require('fs');

function main() {
  const file = process.argv[2];
  const text = file ? fs.readFileSync(file, 'utf8') : fs.readFileSync(0, 'utf8');

  let numVars = 0;
  let sawHeader = false;
  const clauses = [];
  let current = [];
  for (const raw of text.split('\n')) {
    const line = raw.trim();
    if (!line || line[0] === 'c' || line[0] === '%') continue;
    if (line[0] === 'p') {
      const parts = line.split(/\s+/);
      numVars = parseInt(parts[2], 10) || 0;
      sawHeader = true;
      continue;
    }
    for (const tok of line.split(/\s+/)) {
      const lit = parseInt(tok, 10);
      if (Number.isNaN(lit)) continue;
      if (lit === 0) {
        clauses.push(current);
        current = [];
      } else {
        current.push(lit);
      }
    }
  }
  if (!sawHeader) {
    console.error('c missing DIMACS header');
    process.exit(1);
  }

  for (const clause of clauses) {
    if (clause.length === 0) {
      console.log('s UNSATISFIABLE');
      process.exit(20);
    }
  }

  const Logic = require('logic-solver');
  const solver = new Logic.Solver();
  for (const clause of clauses) {
    solver.require(Logic.or(clause.map((l) => (l < 0 ? '-v' + -l : 'v' + l))));
  }

  const solution = solver.solve();
  if (!solution) {
    console.log('s UNSATISFIABLE');
    process.exit(20);
  }

  const trueVars = new Set(solution.getTrueVars());
  console.log('s SATISFIABLE');
  let line = 'v';
  for (let i = 1; i <= numVars; i++) {
    line += ' ' + (trueVars.has('v' + i) ? i : -i);
    if (line.length > 72) {
      console.log(line);
      line = 'v';
    }
  }
  console.log(line + ' 0');
  process.exit(10);
}

main();
