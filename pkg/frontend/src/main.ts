// Browser entry point; tests import app.ts directly instead.
import { mount } from "./app.js";

mount(document.getElementById("app")!);
