#!/usr/bin/env node
import { FIGURE_IDS, render } from "./render.js";

const [runDir, figId] = process.argv.slice(2);
if (!runDir || !figId) {
  console.error("usage: rqmc-plots <run-dir> <figure-id>");
  console.error(`figure ids: ${FIGURE_IDS.join(", ")}`);
  process.exit(2);
}
try {
  const path = render(runDir, figId);
  console.log(`wrote ${path}`);
} catch (err) {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
}
