from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from nucleo.excepciones import DominioError
from experimentos.barridos import PRESETS, obtener_barrido
from experimentos.configuracion import cargar_configuracion
from experimentos.ejecucion import run_experiment
from experimentos.salida import emit_csv, emitir_trazas_csv
from referencias.esquemas import BaselineKind


def errores_de_configuracion(exc):
    return "; ".join(exc.messages) if isinstance(exc, ValidationError) else str(exc)


class Command(BaseCommand):
    help = "Ejecuta un barrido de ENST y escribe la tabla de resultados en CSV."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Ruta del TOML o nombre de un preset incluido")
        parser.add_argument("--barrido", default="potencia", choices=sorted(PRESETS), help="Barrido predefinido")
        parser.add_argument("--out", default="resultados.csv", help="CSV de salida")
        parser.add_argument("--seed", type=int, help="Reemplaza la semilla maestra")
        parser.add_argument("--trials", type=int, help="Reemplaza el numero de ensayos")
        parser.add_argument("--threads", type=int, help="Hilos para repartir los ensayos")
        parser.add_argument("--valores", type=float, nargs="+", help="Reemplaza los valores del barrido")
        parser.add_argument("--esquemas", nargs="+", choices=BaselineKind.values, help="Reemplaza los esquemas del barrido")
        parser.add_argument("--trazas", help="CSV para las trazas de convergencia")

    def handle(self, *args, **options):
        try:
            config = cargar_configuracion(options["config"])
            if options["seed"] is not None:
                config = config.con(semilla=options["seed"])
            if options["trials"] is not None:
                if options["trials"] < 1:
                    raise ValidationError("--trials debe ser al menos 1")
                config = config.con(ensayos=options["trials"])
            barrido = obtener_barrido(options["barrido"])
            if options["valores"]:
                barrido = barrido.con_valores(options["valores"])
            if options["esquemas"]:
                barrido = barrido.con_esquemas(options["esquemas"])
        except (ValidationError, DominioError) as exc:
            raise CommandError(f"Configuracion invalida: {errores_de_configuracion(exc)}", returncode=2)

        resultado = run_experiment(config, barrido, hilos=options["threads"])
        emit_csv(resultado, options["out"])
        self.stdout.write(self.style.SUCCESS(f"{len(resultado.filas)} filas escritas en {options['out']}"))
        if options["trazas"]:
            if resultado.trazas:
                emitir_trazas_csv(resultado.trazas, options["trazas"])
                self.stdout.write(f"{len(resultado.trazas)} trazas escritas en {options['trazas']}")
            else:
                self.stderr.write(self.style.WARNING("El barrido no produjo trazas de convergencia"))
