#pragma once

// Training text for the bundled character-trigram language profiles.

#include <string_view>
#include <utility>
#include <vector>

namespace lexiforge::ingest {

inline const std::vector<std::pair<std::string_view, std::string_view>>& profile_texts() {
  static const std::vector<std::pair<std::string_view, std::string_view>> texts = {
      {"en", R"(The company was founded by a small group of engineers who wanted to build better tools for
the people around them. Over the years the business has grown into an international group with offices
in many countries, but the spirit of the early days is still alive in every team. We believe that good
ideas can come from anywhere, and that is why we invest in training, research and open collaboration with
our customers and partners. Our strategy for the coming years is simple: listen carefully, learn quickly
and deliver products that make a real difference in the daily work of our clients. This year we opened a
new laboratory where designers and developers work side by side on the next generation of services. The
weather was cold and rainy for most of the winter, yet the whole staff kept working with great energy
and good humour. Children were playing in the park while their parents were talking about the news of the
week, the price of houses and the long summer holidays they were already planning. Every employee should
feel that their voice is heard and that their contribution matters to the future of the organisation.
We also want to reduce our impact on the environment, which means using less energy, producing less waste
and choosing suppliers who share these values. Thank you for reading this report and for your trust.)"},
      {"fr", R"(L'entreprise a été fondée par un petit groupe d'ingénieurs qui voulaient construire de meilleurs
outils pour les personnes qui les entouraient. Au fil des années, la société est devenue un groupe
international présent dans de nombreux pays, mais l'esprit des premiers jours reste vivant dans chaque
équipe. Nous pensons que les bonnes idées peuvent venir de partout, c'est pourquoi nous investissons dans
la formation, la recherche et la collaboration ouverte avec nos clients et nos partenaires. Notre
stratégie pour les prochaines années est simple : écouter attentivement, apprendre rapidement et proposer
des produits qui changent vraiment le travail quotidien de nos clients. Cette année, nous avons ouvert un
nouveau laboratoire où les concepteurs et les développeurs travaillent ensemble sur la prochaine
génération de services. Il a fait froid et pluvieux pendant presque tout l'hiver, et pourtant l'ensemble
du personnel a continué à travailler avec beaucoup d'énergie et de bonne humeur. Les enfants jouaient dans
le jardin pendant que leurs parents parlaient des nouvelles de la semaine, du prix des maisons et des
longues vacances d'été qu'ils préparaient déjà. Chaque salarié doit sentir que sa voix est entendue et que
sa contribution compte pour l'avenir de l'organisation. Nous voulons aussi réduire notre impact sur
l'environnement, ce qui signifie consommer moins d'énergie, produire moins de déchets et choisir des
fournisseurs qui partagent ces valeurs. Merci d'avoir lu ce rapport et de votre confiance.)"},
      {"de", R"(Das Unternehmen wurde von einer kleinen Gruppe von Ingenieuren gegründet, die bessere Werkzeuge
für die Menschen in ihrer Umgebung bauen wollten. Im Laufe der Jahre ist die Firma zu einer
internationalen Gruppe mit Büros in vielen Ländern gewachsen, aber der Geist der ersten Tage lebt in
jedem Team weiter. Wir glauben, dass gute Ideen überall entstehen können, und deshalb investieren wir in
Ausbildung, Forschung und offene Zusammenarbeit mit unseren Kunden und Partnern. Unsere Strategie für die
kommenden Jahre ist einfach: aufmerksam zuhören, schnell lernen und Produkte liefern, die in der
täglichen Arbeit unserer Kunden einen echten Unterschied machen. In diesem Jahr haben wir ein neues Labor
eröffnet, in dem Gestalter und Entwickler gemeinsam an der nächsten Generation von Dienstleistungen
arbeiten. Das Wetter war den größten Teil des Winters kalt und regnerisch, doch die gesamte Belegschaft
arbeitete mit großer Energie und guter Laune weiter. Die Kinder spielten im Garten, während ihre Eltern
über die Nachrichten der Woche, die Preise der Häuser und die langen Sommerferien sprachen, die sie schon
planten. Jeder Mitarbeiter soll spüren, dass seine Stimme gehört wird und dass sein Beitrag für die
Zukunft der Organisation zählt. Wir wollen außerdem unsere Auswirkungen auf die Umwelt verringern, also
weniger Energie verbrauchen, weniger Abfall erzeugen und Lieferanten wählen, die diese Werte teilen.
Vielen Dank, dass Sie diesen Bericht gelesen haben, und für Ihr Vertrauen.)"},
      {"es", R"(La empresa fue fundada por un pequeño grupo de ingenieros que querían construir mejores
herramientas para las personas que los rodeaban. Con los años, la compañía se ha convertido en un grupo
internacional con oficinas en muchos países, pero el espíritu de los primeros días sigue vivo en cada
equipo. Creemos que las buenas ideas pueden venir de cualquier parte, y por eso invertimos en formación,
investigación y colaboración abierta con nuestros clientes y socios. Nuestra estrategia para los
próximos años es sencilla: escuchar con atención, aprender rápidamente y ofrecer productos que marquen
una diferencia real en el trabajo diario de nuestros clientes. Este año abrimos un nuevo laboratorio
donde diseñadores y desarrolladores trabajan juntos en la próxima generación de servicios. El tiempo fue
frío y lluvioso durante casi todo el invierno, y aun así todo el personal siguió trabajando con mucha
energía y buen humor. Los niños jugaban en el parque mientras sus padres hablaban de las noticias de la
semana, del precio de las casas y de las largas vacaciones de verano que ya estaban preparando. Cada
empleado debe sentir que su voz es escuchada y que su contribución es importante para el futuro de la
organización. También queremos reducir nuestro impacto en el medio ambiente, lo que significa consumir
menos energía, producir menos residuos y elegir proveedores que compartan estos valores. Gracias por
leer este informe y por su confianza.)"},
      {"it", R"(L'azienda è stata fondata da un piccolo gruppo di ingegneri che volevano costruire strumenti
migliori per le persone che li circondavano. Nel corso degli anni la società è diventata un gruppo
internazionale con uffici in molti paesi, ma lo spirito dei primi giorni è ancora vivo in ogni squadra.
Crediamo che le buone idee possano nascere ovunque, ed è per questo che investiamo nella formazione,
nella ricerca e nella collaborazione aperta con i nostri clienti e partner. La nostra strategia per i
prossimi anni è semplice: ascoltare con attenzione, imparare in fretta e offrire prodotti che facciano
davvero la differenza nel lavoro quotidiano dei nostri clienti. Quest'anno abbiamo aperto un nuovo
laboratorio dove progettisti e sviluppatori lavorano insieme alla prossima generazione di servizi. Il
tempo è stato freddo e piovoso per gran parte dell'inverno, eppure tutto il personale ha continuato a
lavorare con grande energia e buon umore. I bambini giocavano nel parco mentre i loro genitori parlavano
delle notizie della settimana, del prezzo delle case e delle lunghe vacanze estive che stavano già
organizzando. Ogni dipendente deve sentire che la sua voce viene ascoltata e che il suo contributo conta
per il futuro dell'organizzazione. Vogliamo anche ridurre il nostro impatto sull'ambiente, il che
significa consumare meno energia, produrre meno rifiuti e scegliere fornitori che condividano questi
valori. Grazie per aver letto questa relazione e per la vostra fiducia.)"},
  };
  return texts;
}

}  // namespace lexiforge::ingest
